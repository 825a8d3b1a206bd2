#pragma once

#include <filesystem>
#include <string>

#include "srrc/rrc.hpp"

namespace srrc {

inline constexpr const char* kModelFormat = "srrc-model";
inline constexpr int kModelSchemaVersion = 1;

/// Versioned JSON document; reals are written with 17 significant digits so a
/// load reproduces every coefficient bit for bit.
std::string model_to_json(const RRCModel& model);
/// Throws SchemaError (bad magic or structure) or UnsupportedVersion.
RRCModel model_from_json(const std::string& text);

void save_model(const RRCModel& model, const std::filesystem::path& path);
RRCModel load_model(const std::filesystem::path& path);

/// "%.17g" formatting used by every text output of the library.
std::string format_real(double value);

}  // namespace srrc
