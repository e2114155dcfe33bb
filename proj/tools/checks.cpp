#include "checks.hpp"

#include <algorithm>
#include <cmath>

#include "qtlab/operator_dynamics.hpp"
#include "qtlab/phase_space.hpp"
#include "qtlab/poly_observable.hpp"
#include "qtlab/symplectic_cover.hpp"

namespace qtlab::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

double worst_of(const std::vector<double>& values) {
    double w = 0.0;
    for (double v : values) {
        w = std::isnan(v) ? v : std::max(w, v);
        if (std::isnan(w)) {
            break;
        }
    }
    return w;
}

QuadHamiltonian quadratic_part(const RunConfig& cfg) {
    return QuadHamiltonian{cfg.evolution.mass, cfg.spring()};
}

/// Gaussian that exercises the covering checks on the scenario grid.
GaussianState reference_gaussian(const RunConfig& cfg) {
    switch (cfg.scenario) {
    case Scenario::TwoSlit:
        return GaussianState::from_width(0.5 * cfg.two_slit.separation, 0.0, cfg.two_slit.slit_width);
    case Scenario::FreeGaussian:
    case Scenario::Custom:
        return GaussianState::from_width(cfg.x0, cfg.p0, cfg.sigma);
    case Scenario::HarmonicCoherent:
    case Scenario::HarmonicGround:
        return GaussianState{Complex(0.0, 0.5 * std::sqrt(cfg.spring() * cfg.evolution.mass)), cfg.x0, cfg.p0, 0.0};
    }
    return {};
}

Observable random_poly(UniformStream& u, int degree) {
    Observable out;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            out.add(a, b, Complex(std::floor(u(-3.0, 4.0)), std::floor(u(-3.0, 4.0))));
        }
    }
    return out;
}

} // namespace

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::operator()(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return lo + (hi - lo) * unit;
}

const SnapshotSeries& Session::series() {
    if (!series_) {
        series_ = evolve(cfg_.initial_state(), cfg_.evolution);
    }
    return *series_;
}

const std::vector<MadelungFields>& Session::fields() {
    if (!fields_) {
        fields_ = decompose_series(series(), cfg_.evolution.mass);
    }
    return *fields_;
}

const TrajectoryBundle& Session::bundle() {
    if (!bundle_) {
        const bool stratified = cfg_.explicit_seeds.empty();
        const RealField seeds = stratified ? stratified_seeds(series().snapshots.front(), cfg_.trajectory_count)
                                           : Eigen::Map<const RealField>(cfg_.explicit_seeds.data(),
                                                                         static_cast<Index>(cfg_.explicit_seeds.size()));
        bundle_ = integrate_bundle(series(), seeds, cfg_.evolution.mass);
        if (stratified) {
            bundle_->seed_rule = "stratified_inverse_cdf";
        }
    }
    return *bundle_;
}

std::vector<Index> Session::sample_indices(Index count) {
    const Index last = series().size() - 1;
    if (count <= 1 || last == 0) {
        return {last};
    }
    std::vector<Index> out;
    for (Index i = 0; i < count; ++i) {
        const Index k = (2 * i * last + (count - 1)) / (2 * (count - 1));
        if (out.empty() || out.back() != k) {
            out.push_back(k);
        }
    }
    return out;
}

double bridge_gap(const WaveFunction& psi, double mass) {
    const ConditionalMomentum c = conditional_momentum(wigner(psi));
    const MadelungFields f = decompose(psi, mass);
    const double floor = kBridgeDensityFloor * f.rho.maxCoeff();
    double worst = 0.0;
    for (Index j = 0; j < psi.size(); ++j) {
        if (f.mask[j] && c.mask[j] && f.rho[j] > floor) {
            worst = std::max(worst, std::abs(c.mean[j] - f.grad_S[j]));
        }
    }
    return worst;
}

void residual_checks(Session& s, InvariantReport& r, bool continuity, bool qhj) {
    const RunConfig& cfg = s.config();
    const double m = cfg.evolution.mass;
    if (continuity) {
        r.add("continuity_residual", continuity_residual(s.series(), m).max_abs(), threshold::kResidual);
    }
    if (qhj) {
        r.add("qhj_residual", qhj_residual(s.series(), m, cfg.evolution.potential).max_abs(), threshold::kResidual);
        if (cfg.spring() > 0.0) {
            r.add("qhj_residual_p", qhj_residual_p(s.series(), m, cfg.spring()).max_abs(), threshold::kResidual);
        }
        if (cfg.scenario == Scenario::HarmonicGround) {
            double worst = 0.0;
            for (const MadelungFields& f : s.fields()) {
                worst = std::max(worst, f.mask.select(f.grad_S.array().abs(), 0.0).maxCoeff());
            }
            r.add("stationary_bohm_momentum", worst, threshold::kStationary);
        }
    }
}

void weak_checks(Session& s, InvariantReport& r) {
    double worst = 0.0;
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        worst = std::max(worst, bohm_osmotic_split(s.series()[k]).max_deviation);
    }
    r.add("weak_value_split", worst, threshold::kWeakSplit);
}

void wigner_checks(Session& s, InvariantReport& r) {
    std::vector<double> position;
    std::vector<double> momentum;
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        const WaveFunction& psi = s.series()[k];
        const MarginalDefects d = marginal_defects(wigner(psi), psi);
        position.push_back(d.position_l1);
        momentum.push_back(d.momentum_l1);
    }
    r.add("wigner_position_marginal", worst_of(position), threshold::kMarginal);
    r.add("wigner_momentum_marginal", worst_of(momentum), threshold::kMarginal);
}

void moyal_checks(Session& s, InvariantReport& r) {
    std::vector<double> gaps;
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        gaps.push_back(bridge_gap(s.series()[k], s.config().evolution.mass));
    }
    r.add("conditional_momentum_bridge", worst_of(gaps), threshold::kBridge);
}

void trajectory_checks(Session& s, InvariantReport& r) {
    const TrajectoryBundle& b = s.bundle();
    r.add("trajectory_crossings", static_cast<double>(crossing_violations(b)), 0.0);
    if (s.config().explicit_seeds.empty()) {
        r.add("equivariance_l1", endpoint_l1(b, s.series().snapshots.back()), threshold::kEquivariance);
    }
}

double DiracSample::gf_gap() const {
    const auto rel = [](double p, double q) { return std::abs(p - q) / std::max({std::abs(p), std::abs(q), 1.0}); };
    return std::max(rel(gf_final, momenta.final_momentum), rel(gf_initial, momenta.initial_momentum));
}

std::vector<DiracSample> dirac_samples(const RunConfig& cfg) {
    const double m = cfg.evolution.mass;
    const double spring = cfg.spring() > 0.0 ? cfg.spring() : 1.0;
    const double omega = std::sqrt(spring / m);
    UniformStream u(cfg.dirac_seed);
    std::vector<DiracSample> out;
    for (Index i = 0; i < cfg.dirac_samples; ++i) {
        const double x = u(-4.0, 4.0);
        const double x0 = u(-4.0, 4.0);
        const double eps_free = u(0.1, 2.0);
        const double eps_osc = u(0.1, 2.5) / omega;
        const GeneratingFunction g_free = generating_function(QuadHamiltonian{m, 0.0}, eps_free);
        const GeneratingFunction g_osc = generating_function(QuadHamiltonian{m, spring}, eps_osc);
        out.push_back({"free", x, x0, eps_free, dirac_momenta(kernel::Free{}, m, x, x0, eps_free),
                       g_free.final_momentum(x, x0), g_free.initial_momentum(x, x0)});
        out.push_back({"harmonic", x, x0, eps_osc, dirac_momenta(kernel::Harmonic{spring}, m, x, x0, eps_osc),
                       g_osc.final_momentum(x, x0), g_osc.initial_momentum(x, x0)});
    }
    return out;
}

void dirac_checks(Session& s, InvariantReport& r) {
    double fd_free = 0.0;
    double fd_osc = 0.0;
    double gf = 0.0;
    for (const DiracSample& d : dirac_samples(s.config())) {
        double& fd = d.kernel == "free" ? fd_free : fd_osc;
        fd = std::max(fd, d.momenta.max_relative_gap());
        gf = std::max(gf, d.gf_gap());
    }
    r.add("dirac_free_fd_gap", fd_free, threshold::kDirac);
    r.add("dirac_harmonic_fd_gap", fd_osc, threshold::kDirac);
    r.add("dirac_generating_function_gap", gf, threshold::kDirac);
}

void cover_checks(Session& s, InvariantReport& r) {
    const RunConfig& cfg = s.config();
    const Grid1D grid = cfg.grid();
    const QuadHamiltonian h = quadratic_part(cfg);
    const GaussianState g = reference_gaussian(cfg);
    const double t = 1.0;

    r.add("symplectic_defect", symplectic_defect(classical_flow(h, t)), threshold::kSymplectic);

    EvolutionConfig ev;
    ev.dt = std::min(cfg.evolution.dt, 2.5e-4);
    ev.steps = std::llround(t / ev.dt);
    ev.snapshot_stride = ev.steps;
    ev.mass = h.mass;
    if (!h.is_free()) {
        ev.potential = potential::Harmonic{h.spring};
    }
    const WaveFunction split = evolve(g.sample(grid), ev).snapshots.back();
    r.add("metaplectic_vs_split_operator", l2_distance(metaplectic_step(g, h, t).sample(grid, t), split),
          threshold::kMetaplectic);
    r.add("wigner_transport_defect", projection_check(g, h, t, grid), threshold::kMetaplectic);

    const QuadHamiltonian osc = h.is_free() ? QuadHamiltonian{h.mass, 1.0} : h;
    r.add("full_period_phase_defect", std::abs(full_period_phase(osc, g) + kPi), threshold::kPeriodPhase);
    const double period = 2.0 * kPi / osc.omega();
    const WaveFunction start = g.sample(grid);
    const Complex twice = inner_product(start, metaplectic_step(g, osc, 2.0 * period).sample(grid));
    r.add("two_period_return", std::abs(twice - 1.0), threshold::kPeriodReturn);
}

void algebra_checks(InvariantReport& r) {
    UniformStream u(7);
    double assoc = 0.0;
    double quadratic = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Observable a = random_poly(u, 4);
        const Observable b = random_poly(u, 4);
        const Observable c = random_poly(u, 4);
        const Observable q = random_poly(u, 2);
        for (double hbar : {1.0, 0.5}) {
            assoc = std::max(assoc, (star(star(a, b, hbar), c, hbar) - star(a, star(b, c, hbar), hbar)).max_abs_coeff());
            quadratic = std::max(quadratic, (moyal_bracket(q, a, hbar) - poisson_bracket(q, a)).max_abs_coeff());
        }
    }
    r.add("star_associativity", assoc, 0.0);
    r.add("moyal_poisson_quadratic", quadratic, 0.0);

    const Observable x3 = Observable::monomial(3, 0);
    const Observable p3 = Observable::monomial(0, 3);
    double slope_gap = 0.0;
    double previous = 0.0;
    for (double hbar : {1.0, 0.5, 0.25, 0.125}) {
        const double size = (moyal_bracket(x3, p3, hbar) - poisson_bracket(x3, p3)).max_abs_coeff();
        if (hbar < 1.0) {
            slope_gap = std::max(slope_gap, std::abs(std::log(size / previous) / std::log(0.5) - 2.0));
        }
        previous = size;
    }
    r.add("moyal_cubic_slope", slope_gap, threshold::kSlope);
}

void operator_checks(Session& s, InvariantReport& r) {
    const RunConfig& cfg = s.config();
    const double spring = cfg.spring() > 0.0 ? cfg.spring() : 1.0;
    const BasisConfig basis{cfg.basis_size, spring, cfg.evolution.mass};
    const StateVector psi = coherent_state(basis, Complex(1.0, 0.0));
    const DensityMatrix rho = DensityMatrix::pure(psi);
    r.add("commutator_vs_conjugation",
          (evolve_commutator(rho, basis, 1.0).rho - exact_conjugation(rho, basis, 1.0).rho).norm(),
          threshold::kConjugation);
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    r.add("anticommutator_identity", worst_of(anticommutator_residual(schrodinger_trajectory(psi, basis, times), basis)),
          threshold::kAnticommutator);
    if (cfg.spring() > 0.0 && std::holds_alternative<potential::Harmonic>(cfg.evolution.potential)) {
        const ProjectionAgreement a = compare_projection(s.series(), cfg.evolution.mass, cfg.spring());
        r.add("projected_continuity_gap", a.continuity_gap, threshold::kProjection);
        r.add("projected_energy_gap", a.energy_gap, threshold::kProjection);
    }
}

} // namespace qtlab::cli
