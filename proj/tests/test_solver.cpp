#include <doctest.h>

#include <cmath>

#include "latimp/solver.hpp"

using namespace latimp;

namespace {

CouplingSystem square_system(int n_side, double spacing = 0.15,
                             double gamma_I = 1.0) {
    LatticeSpec spec;
    spec.kind = LatticeKind::square;
    spec.spacing = spacing;
    spec.n_atoms = n_side * n_side;
    EmitterArray array = build_lattice(spec);
    array.gamma_I = gamma_I;
    return assemble_system(array);
}

CouplingSystem scalar_system(Complex coupling, double gamma_I = 1.0) {
    CouplingSystem system;
    system.H_cpl = Eigen::MatrixXcd::Zero(1, 1);
    system.C_LI = Eigen::VectorXcd::Constant(1, coupling);
    system.gamma_I = gamma_I;
    return system;
}

}  // namespace

TEST_CASE("scalar elimination") {
    const Complex c(0.4, -0.3);
    const auto system = scalar_system(c);
    for (double delta : {-2.0, -0.1, 0.0, 0.7, 3.0}) {
        const auto sigma = self_energy(system, delta);
        const Complex expected = c * c / Complex(delta, 0.5);
        CHECK(std::abs(sigma.sigma - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("symmetric pair against the analytic two-by-two resolvent") {
    EmitterArray array;
    array.lattice_positions = {{0.11, 0.0, 0.0}, {-0.11, 0.0, 0.0}};
    array.impurity_position = {0.0, 0.0, 0.0};
    const auto system = assemble_system(array);
    const Complex g = system.H_cpl(0, 1);
    const Complex c = system.C_LI(0);
    for (double delta : {-1.0, 0.3, 2.2}) {
        // H = [[h, g], [g, h]] with h = -(delta + i/2); C = (c, c)
        // Sigma = -C^T H^{-1} C = -2 c^2 / (h + g)
        const Complex h(-delta, -0.5);
        const Complex expected = -2.0 * c * c / (h + g);
        const auto sigma = self_energy(system, delta);
        CHECK(std::abs(sigma.sigma - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("effective decay") {
    SUBCASE("decoupled impurity keeps its bare rate") {
        CHECK(effective_decay(0.8, {Complex(0.0, 0.0), 0.0}) ==
              doctest::Approx(0.8));
    }
    SUBCASE("positive imaginary self-energy suppresses the decay") {
        CHECK(effective_decay(1.0, {Complex(0.2, 0.3), 0.0}) <
              1.0);
        CHECK(effective_decay(1.0, {Complex(0.2, 0.3), 0.0}) ==
              doctest::Approx(1.0 - 0.6));
    }
    SUBCASE("collective shift is the real part") {
        CHECK(collective_shift({Complex(0.2, 0.3), 0.0}) ==
              doctest::Approx(0.2));
    }
}

TEST_CASE("sweep of the scalar system matches the closed form everywhere") {
    const Complex c(0.35, -0.41);
    const auto system = scalar_system(c);
    SweepOptions opt;
    opt.n_points = 501;
    opt.refine = false;
    const auto curve = detuning_sweep(system, opt);
    for (size_t k = 0; k < curve.detunings.size(); ++k) {
        const Complex sigma = c * c / Complex(curve.detunings[k], 0.5);
        const double expected = 1.0 - 2.0 * sigma.imag();
        CHECK(curve.gamma_eff[k] ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("decoupled impurity sweeps flat") {
    CouplingSystem system;
    system.H_cpl = Eigen::MatrixXcd::Zero(4, 4);
    system.H_cpl(0, 1) = system.H_cpl(1, 0) = Complex(0.2, -0.1);
    system.C_LI = Eigen::VectorXcd::Zero(4);
    system.gamma_I = 0.7;
    SweepOptions opt;
    opt.n_points = 101;
    const auto curve = eigen_sweep(system, opt);
    for (double g : curve.gamma_eff) CHECK(g == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(!curve.band_edge.has_value());
    CHECK(!curve.d_be.has_value());
}

TEST_CASE("eigen sweep agrees with direct solves") {
    auto system = square_system(6);
    SweepOptions opt;
    opt.n_points = 401;
    opt.refine = false;
    const auto direct = detuning_sweep(system, opt);
    const auto fast = eigen_sweep(system, opt);
    REQUIRE(!fast.fallback_used);
    double worst = 0.0;
    for (size_t k = 0; k < direct.gamma_eff.size(); ++k) {
        const double a = direct.gamma_eff[k], b = fast.gamma_eff[k];
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("scalar eigen sweep reduces to the pole formula") {
    const Complex c(0.3, -0.2);
    auto system = scalar_system(c);
    SweepOptions opt;
    opt.n_points = 201;
    opt.refine = false;
    const auto curve = eigen_sweep(system, opt);
    for (size_t k = 0; k < curve.detunings.size(); ++k) {
        const Complex sigma =
            -c * c / (Complex(0.0, 0.0) - Complex(curve.detunings[k], 0.5));
        CHECK(curve.gamma_eff[k] ==
              doctest::Approx(1.0 - 2.0 * sigma.imag()).epsilon(1e-12));
    }
}

TEST_CASE("band edge detection from samples") {
    SUBCASE("monotone curve has no edge") {
        std::vector<double> d, g;
        for (int i = 0; i < 50; ++i) {
            d.push_back(i * 0.1);
            g.push_back(1.0 + i * 0.01);
        }
        CHECK(!detect_band_edge(d, g, 1.0).has_value());
    }
    SUBCASE("largest strong local maximum wins") {
        std::vector<double> d, g;
        for (int i = 0; i <= 100; ++i) {
            const double x = i * 0.1;
            d.push_back(x);
            double v = 0.5;
            if (std::abs(x - 2.0) < 0.05) v = 50.0;   // strong peak
            if (std::abs(x - 5.0) < 0.05) v = 20.0;   // strong peak (later)
            if (std::abs(x - 8.0) < 0.05) v = 3.0;    // too weak
            g.push_back(v);
        }
        const auto edge = detect_band_edge(d, g, 1.0);
        REQUIRE(edge.has_value());
        CHECK(*edge == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("NaN gaps are skipped") {
        std::vector<double> d = {0, 1, 2, 3, 4};
        std::vector<double> g = {1.0, std::nan(""), 40.0, 1.0, 1.0};
        CHECK(!detect_band_edge(d, g, 1.0).has_value());
    }
}

TEST_CASE("pole band edge flags narrow strong resonances") {
    Eigen::VectorXcd lambda(3), weights(3);
    lambda << Complex(1.0, -0.4999), Complex(2.0, -0.4),
        Complex(3.0, -0.49999);
    // peak height = 1 + 4 Re(w) / (1 - 2 Im lambda)
    weights << Complex(1.0, 0.0),   // width 1.9998, peak ~3   -> weak
        Complex(1.0, 0.0),          // width 1.8,    peak ~3.2 -> weak
        Complex(0.1, 0.0);          // width 1.99998, peak ~1.2 -> weak
    CHECK(!pole_band_edge(lambda, weights, 1.0, 1.0).has_value());
    weights(0) = Complex(500.0, 0.0);  // peak ~1001 at Re = 1
    weights(2) = Complex(25.0, 0.0);   // peak ~51 at Re = 3
    const auto edge = pole_band_edge(lambda, weights, 1.0, 1.0);
    REQUIRE(edge.has_value());
    CHECK(*edge == doctest::Approx(3.0));
}

TEST_CASE("golden refinement localizes the scalar minimum") {
    const Complex c(0.5, -0.25);
    const auto system = scalar_system(c);
    SweepOptions coarse;
    coarse.n_points = 201;
    coarse.refine = true;
    const auto refined = detuning_sweep(system, coarse);
    SweepOptions dense;
    dense.n_points = 200001;
    dense.refine = false;
    const auto exact = detuning_sweep(system, dense);
    CHECK(std::abs(refined.delta_min - exact.delta_min) < 2e-4);
    CHECK(refined.gamma_min <= exact.gamma_min + 1e-12);
}

TEST_CASE("resonance refusal carries the detuning") {
    // hand-built block with an eigenvalue at exactly delta + i gamma_L / 2
    CouplingSystem system;
    system.H_cpl = Eigen::MatrixXcd::Zero(2, 2);
    system.H_cpl(0, 1) = system.H_cpl(1, 0) = Complex(0.8, 0.5);
    // eigenvalues are +-(0.8 + 0.5i); H_L(0.8) is exactly singular
    CHECK_THROWS_AS(self_energy(system, 0.8), ResonanceError);
    try {
        self_energy(system, 0.8);
    } catch (const ResonanceError& e) {
        CHECK(e.delta() == doctest::Approx(0.8));
    }
    // all-resonant grid: every point within working precision of the pole
    SweepOptions opt;
    opt.delta_min = 0.8 - 1e-15;
    opt.delta_max = 0.8 + 1e-15;
    opt.n_points = 3;
    opt.refine = false;
    CHECK_THROWS_AS(detuning_sweep(system, opt), NumericalError);
}

TEST_CASE("pole structure near an isolated eigenvalue") {
    // two close atoms: poles at +-c with |c| ~ 14, far apart on the scale of
    // the probing window, so the non-resonant background is nearly constant
    EmitterArray array;
    array.lattice_positions = {{0.025, 0.0, 0.0}, {-0.025, 0.0, 0.0}};
    array.impurity_position = {0.004, 0.007, 0.0};
    auto system = assemble_system(array);
    const auto& cache = ensure_eigen_cache(system);
    const Eigen::VectorXcd w = mode_weights(cache, system.C_LI);

    // the mode with the larger real part
    int k = cache.eigenvalues(0).real() > cache.eigenvalues(1).real() ? 0 : 1;
    const Complex lambda_k = cache.eigenvalues(k);

    // constant-background fit of Sigma - pole over a window of width 0.1
    const int n = 41;
    Complex background(0.0, 0.0);
    std::vector<Complex> sigmas(n), poles(n);
    for (int i = 0; i < n; ++i) {
        const double d = lambda_k.real() - 0.05 + 0.1 * i / (n - 1.0);
        sigmas[i] = self_energy(system, d).sigma;
        poles[i] = -w(k) / (lambda_k - Complex(d, 0.5));
        background += sigmas[i] - poles[i];
    }
    background /= static_cast<double>(n);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(sigmas[i] - poles[i] - background));
        scale = std::max(scale, std::abs(sigmas[i]));
    }
    CHECK(worst / scale < 0.01);
}

TEST_CASE("effective decay curve is grid-consistent away from resonances") {
    auto system = square_system(4);
    ensure_eigen_cache(system);
    // window beyond the band edge: smooth region of the curve
    SweepOptions h_opt;
    h_opt.delta_min = 3.0;
    h_opt.delta_max = 7.0;
    h_opt.n_points = 101;
    h_opt.refine = false;
    SweepOptions h2_opt = h_opt;
    h2_opt.n_points = 201;
    const auto coarse = eigen_sweep(system, h_opt);
    const auto fine = eigen_sweep(system, h2_opt);
    // linear interpolation error at midpoints must shrink ~ h^2
    auto midpoint_error = [](const SweepCurve& grid, const SweepCurve& ref) {
        double worst = 0.0;
        for (size_t i = 0; i + 1 < grid.detunings.size(); ++i) {
            const double interp = 0.5 * (grid.gamma_eff[i] + grid.gamma_eff[i + 1]);
            const double exact = ref.gamma_eff[2 * i + 1];
            worst = std::max(worst, std::abs(interp - exact));
        }
        return worst;
    };
    SweepOptions h4_opt = h_opt;
    h4_opt.n_points = 401;
    const auto finer = eigen_sweep(system, h4_opt);
    const double e_h = midpoint_error(coarse, fine);
    const double e_h2 = midpoint_error(fine, finer);
    CHECK(e_h2 < e_h / 2.5);  // second-order consistency
}
