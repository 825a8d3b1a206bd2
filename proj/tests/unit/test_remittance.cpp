#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "srrc/errors.hpp"
#include "srrc/remittance.hpp"

using namespace srrc;

namespace {

const SolverConfig kSolver{1e-8, 50, 1e-10};

Matrix rows_of(std::initializer_list<std::initializer_list<double>> v) {
    Matrix m(static_cast<Index>(v.size()), static_cast<Index>(v.begin()->size()));
    Index r = 0;
    for (const auto& row : v) {
        Index c = 0;
        for (double e : row) m(r, c++) = e;
        ++r;
    }
    return m;
}

// Deposits d(t) = M r(t) with M institutions x regions, 30% density, no bias.
RemittancePanel planted_linear(std::mt19937_64& gen, Index regions, Index institutions, Index quarters) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m = Matrix::Zero(institutions, regions);
    for (Index i = 0; i < institutions; ++i) {
        for (Index k = 0; k < regions; ++k) {
            if (u(gen) < 0.3) m(i, k) = 0.2 + 0.8 * u(gen);
        }
        if (m.row(i).isZero()) m(i, i % regions) = 1.0;
    }
    RemittancePanel p;
    p.remittances = (oracle::gaussian(gen, quarters, regions).array() + 10.0).matrix();
    p.deposits = p.remittances * m.transpose();
    return p;
}

}  // namespace

TEST_CASE("exposure formula on hand-checked inputs") {
    const Matrix observed = rows_of({{1, -4}, {2, 3}, {-3, 1}});
    CHECK(exposure(observed, observed).isZero(0.0));

    Matrix shifted = observed;
    shifted.col(0).array() += 3.0;
    shifted.col(1).array() += 4.0;
    const Vector e = exposure(observed, shifted);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-15));

    const Vector single = exposure(rows_of({{1}, {2}}), rows_of({{1}, {0}}));
    CHECK(single[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("exposure is scale invariant and non-negative") {
    std::mt19937_64 gen(3);
    const Matrix obs = oracle::gaussian(gen, 12, 4);
    const Matrix fit = obs + oracle::gaussian(gen, 12, 4, 0.1);
    const Vector base = exposure(obs, fit);
    CHECK((base.array() >= 0.0).all());
    for (double lambda : {1e-3, 0.5, 7.0, 1e4}) {
        CHECK((exposure(lambda * obs, lambda * fit) - base).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("exposure rejects degenerate input") {
    Matrix obs = Matrix::Ones(3, 3);
    obs.col(1).setZero();
    try {
        exposure(obs, obs);
        FAIL("expected a degenerate channel");
    } catch (const DegenerateChannel& e) {
        CHECK(e.channel() == 1);
        CHECK(std::string(e.what()).find("channel 2") != std::string::npos);
    }
    CHECK_THROWS_AS(exposure(Matrix::Ones(3, 2), Matrix::Ones(2, 2)), DimensionMismatch);
}

TEST_CASE("rank_exposures orders by exposure and breaks ties by index") {
    Vector e(3);
    e << 0.1, 0.5, 0.3;
    const auto top = rank_exposures(e, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].institution == 2);
    CHECK(top[0].exposure == 0.5);
    CHECK(top[1].institution == 3);
    const auto full = rank_exposures(e, 3);
    CHECK(full[2].institution == 1);

    const auto tied = rank_exposures(Vector::Constant(4, 0.2), 3);
    CHECK(tied[0].institution == 1);
    CHECK(tied[1].institution == 2);
    CHECK(tied[2].institution == 3);
    CHECK_THROWS_AS(rank_exposures(e, 0), InvalidArgument);
    CHECK_THROWS_AS(rank_exposures(e, 4), InvalidArgument);
}

TEST_CASE("a planted linear panel is fitted exactly") {
    std::mt19937_64 gen(11);
    const RemittancePanel p = planted_linear(gen, 18, 15, 60);
    ExposureOptions opts;
    const ExposureReport r = exposure_report(p, ModelKind::NonLagged, opts);
    CHECK(r.exposures.maxCoeff() <= 1e-8);
    CHECK((r.fitted - p.deposits).cwiseAbs().maxCoeff() <= 1e-8 * p.deposits.cwiseAbs().maxCoeff());
}

TEST_CASE("constant deposits are carried by the bias column") {
    std::mt19937_64 gen(12);
    RemittancePanel p;
    p.remittances = (oracle::gaussian(gen, 20, 5).array() + 3.0).matrix();
    p.deposits = Matrix::Constant(20, 3, 7.0);
    const ExposureReport r = exposure_report(p, ModelKind::NonLagged, {});
    CHECK(r.exposures.maxCoeff() <= 1e-10);
}

TEST_CASE("shuffling the deposit rows destroys the fit") {
    std::mt19937_64 gen(13);
    const RemittancePanel p = planted_linear(gen, 6, 5, 40);
    RemittancePanel shuffled = p;
    std::vector<Index> order(40);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), gen);
    for (Index q = 0; q < 40; ++q) shuffled.deposits.row(q) = p.deposits.row(order[static_cast<std::size_t>(q)]);
    const Vector good = exposure_report(p, ModelKind::NonLagged, {}).exposures;
    const Vector bad = exposure_report(shuffled, ModelKind::NonLagged, {}).exposures;
    for (Index j = 0; j < good.size(); ++j) CHECK(bad[j] > 1e3 * std::max(good[j], 1e-12));
}

TEST_CASE("zero-noise synthetic panels are fitted exactly by the matching model") {
    const PlantedPanel lagged = synth_panel(18, 15, 24, 5, 0.0, true);
    CHECK(exposure_report(lagged.panel, ModelKind::Lagged, {}).exposures.maxCoeff() <= 1e-8);
    const PlantedPanel flat = synth_panel(18, 15, 24, 5, 0.0, false);
    CHECK(flat.M1.isZero(0.0));
    CHECK(exposure_report(flat.panel, ModelKind::NonLagged, {}).exposures.maxCoeff() <= 1e-8);
}

TEST_CASE("without planted lag terms the lagged and plain fits agree") {
    const PlantedPanel flat = synth_panel(18, 15, 24, 6, 0.0, false);
    const ExposureReport plain = exposure_report(flat.panel, ModelKind::NonLagged, {});
    const ExposureReport lagged = exposure_report(flat.panel, ModelKind::Lagged, {});
    CHECK((lagged.fitted - plain.fitted.bottomRows(lagged.fitted.rows())).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("lagged fits never lose to plain fits on training data") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const PlantedPanel p = synth_panel(4, 3, 40, seed, 0.05, false);
        const RemittanceFit plain = fit_nonlagged(p.panel, kSolver, 1.0);
        const RemittanceFit lagged = fit_lagged(p.panel, kSolver, 1.0);
        // Same evaluation rows for both: quarters 2..Q.
        const Matrix pred_plain = predict_deposits(plain, p.panel).bottomRows(39);
        const Matrix pred_lagged = predict_deposits(lagged, p.panel);
        const Matrix obs = p.panel.deposits.bottomRows(39);
        CHECK((pred_lagged - obs).norm() <= (pred_plain - obs).norm() + 1e-9);
    }
}

TEST_CASE("coefficients depend only on the training rows") {
    const PlantedPanel p = synth_panel(5, 4, 30, 8, 0.02, true);
    const Index train = leading_rows(0.8, 30);
    RemittancePanel perturbed = p.panel;
    perturbed.deposits.bottomRows(30 - train).array() += 100.0;
    perturbed.remittances.bottomRows(30 - train).array() *= 3.0;
    for (ModelKind kind : {ModelKind::NonLagged, ModelKind::Lagged}) {
        const RemittanceFit a = kind == ModelKind::Lagged ? fit_lagged(p.panel, kSolver, 0.8)
                                                          : fit_nonlagged(p.panel, kSolver, 0.8);
        const RemittanceFit b = kind == ModelKind::Lagged ? fit_lagged(perturbed, kSolver, 0.8)
                                                          : fit_nonlagged(perturbed, kSolver, 0.8);
        CHECK(a.train_rows == train);
        CHECK(a.model == b.model);
    }
}

TEST_CASE("leading_rows rounds up") {
    CHECK(leading_rows(0.95, 24) == 23);
    CHECK(leading_rows(0.5, 12000) == 6000);
    CHECK(leading_rows(0.0667, 12000) == 801);
    CHECK(leading_rows(1.0, 7) == 7);
    CHECK(leading_rows(0.1, 10) == 1);
}

TEST_CASE("panel preconditions") {
    const PlantedPanel p = synth_panel(3, 2, 2, 0, 0.0, true);
    CHECK_THROWS_AS(fit_lagged(p.panel, kSolver, 1.0), InvalidArgument);
    CHECK_NOTHROW(fit_nonlagged(p.panel, kSolver, 1.0));
    const PlantedPanel one = synth_panel(3, 2, 1, 0, 0.0, true);
    CHECK_THROWS_AS(fit_nonlagged(one.panel, kSolver, 1.0), InvalidArgument);
    RemittancePanel bad = p.panel;
    bad.deposits = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(fit_nonlagged(bad, kSolver, 1.0), DimensionMismatch);
    CHECK_THROWS_AS(fit_nonlagged(p.panel, kSolver, 0.0), InvalidArgument);
}

TEST_CASE("synthetic panels are shaped, positive and seed-deterministic") {
    const PlantedPanel a = synth_panel(18, 15, 24, 9, 0.01, true);
    CHECK(a.panel.remittances.rows() == 24);
    CHECK(a.panel.remittances.cols() == 18);
    CHECK(a.panel.deposits.rows() == 24);
    CHECK(a.panel.deposits.cols() == 15);
    CHECK((a.panel.remittances.array() > 0.0).all());
    const PlantedPanel b = synth_panel(18, 15, 24, 9, 0.01, true);
    CHECK(a.panel.remittances == b.panel.remittances);
    CHECK(a.panel.deposits == b.panel.deposits);
    CHECK(a.M0 == b.M0);
    const PlantedPanel c = synth_panel(18, 15, 24, 10, 0.01, true);
    CHECK(a.panel.remittances != c.panel.remittances);
    for (Index i = 0; i < 15; ++i) CHECK(!a.M0.row(i).isZero(0.0));
}

TEST_CASE("coupling edges name regions and lags") {
    const PlantedPanel p = synth_panel(3, 2, 30, 4, 0.0, true);
    RemittanceFit fit = fit_lagged(p.panel, kSolver, 1.0);
    const auto edges = coupling_edges(fit);
    CHECK(!edges.empty());
    for (const auto& e : edges) {
        CHECK(e.institution >= 1);
        CHECK(e.institution <= 2);
        CHECK(e.region >= 0);
        CHECK(e.region <= 3);
        CHECK((e.lag == 0 || e.lag == 1));
        CHECK(e.weight != 0.0);
        if (e.region == 0) CHECK(e.lag == 0);
    }
}
