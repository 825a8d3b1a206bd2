#pragma once

#include "srrc/autocorrelation.hpp"
#include "srrc/compression.hpp"
#include "srrc/csv.hpp"
#include "srrc/embedding.hpp"
#include "srrc/errors.hpp"
#include "srrc/finance_sim.hpp"
#include "srrc/linalg.hpp"
#include "srrc/model_io.hpp"
#include "srrc/random.hpp"
#include "srrc/remittance.hpp"
#include "srrc/rrc.hpp"
