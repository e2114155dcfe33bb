#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>

#include "artifacts.hpp"
#include "checks.hpp"
#include "qtlab/phase_space.hpp"

namespace qtlab::cli {

namespace fs = std::filesystem;

namespace {

std::string indexed(const char* stem, Index k) { return std::string(stem) + "_t" + std::to_string(k) + ".csv"; }

long long flag(bool b) { return b ? 1 : 0; }

int finish(const InvariantReport& r, const RunConfig& cfg, const fs::path& file) {
    write_json(file, r.to_json(cfg));
    return r.all_pass() ? kPass : kCheckFail;
}

int cmd_evolve(Session& s, const fs::path& out) {
    const RunConfig& cfg = s.config();
    const SnapshotSeries& series = s.series();
    const auto& fields = s.fields();
    nlohmann::ordered_json manifest;
    manifest["command"] = "evolve";
    manifest["config_hash"] = hex_hash(cfg.hash());
    manifest["config"] = config_echo(cfg);
    nlohmann::ordered_json snaps = nlohmann::ordered_json::array();
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (Index k = 0; k < series.size(); ++k) {
        const WaveFunction& psi = series[k];
        const MadelungFields& f = fields[static_cast<size_t>(k)];
        const std::string psi_name = indexed("psi", k);
        const std::string fields_name = indexed("fields", k);
        {
            CsvWriter csv(out / psi_name, {"x", "re", "im"});
            for (Index j = 0; j < psi.size(); ++j) {
                csv.cell(psi.grid().x(j)).cell(psi[j].real()).cell(psi[j].imag()).end_row();
            }
        }
        {
            CsvWriter csv(out / fields_name, {"x", "rho", "S", "p_bohm", "p_osmotic", "Q", "mask"});
            for (Index j = 0; j < psi.size(); ++j) {
                csv.cell(psi.grid().x(j)).cell(f.rho[j]).cell(f.S[j]).cell(f.grad_S[j]).cell(f.p_osmotic[j]);
                csv.cell(f.Q[j]).cell(flag(f.mask[j])).end_row();
            }
        }
        snaps.push_back({{"index", k}, {"t", psi.time()}, {"psi", psi_name}, {"fields", fields_name}});
        files.push_back(psi_name);
        files.push_back(fields_name);
    }
    files.push_back("manifest.json");
    manifest["snapshots"] = std::move(snaps);
    manifest["files"] = std::move(files);
    write_json(out / "manifest.json", manifest);
    return kPass;
}

int cmd_trajectories(Session& s, const fs::path& out) {
    const TrajectoryBundle& b = s.bundle();
    {
        CsvWriter csv(out / "trajectories.csv", {"traj_id", "t", "x", "p_bohm"});
        for (Index i = 0; i < b.count(); ++i) {
            for (Index k = 0; k < b.positions.rows(); ++k) {
                if (std::isnan(b.positions(k, i))) {
                    break;
                }
                csv.cell(static_cast<long long>(i)).cell(b.times[static_cast<size_t>(k)]);
                csv.cell(b.positions(k, i)).cell(b.momenta(k, i)).end_row();
            }
        }
    }
    nlohmann::ordered_json doc;
    doc["config_hash"] = hex_hash(s.config().hash());
    doc["seed_rule"] = b.seed_rule;
    doc["trajectories"] = b.count();
    auto& list = doc["truncations"] = nlohmann::ordered_json::array();
    for (const Truncation& t : b.truncations) {
        list.push_back({{"traj_id", t.trajectory},
                        {"last_valid", t.last_valid},
                        {"t", t.time},
                        {"reason", to_string(t.reason)}});
    }
    write_json(out / "truncations.json", doc);
    return kPass;
}

int cmd_wigner(Session& s, const fs::path& out) {
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        const WignerGrid w = wigner(s.series()[k]);
        CsvWriter csv(out / indexed("wigner", k), {"x", "p", "w"});
        for (Index a = 0; a < w.X.size(); ++a) {
            for (Index b = 0; b < w.P.size(); ++b) {
                csv.cell(w.X[a]).cell(w.P[b]).cell(w.F(a, b)).end_row();
            }
        }
    }
    InvariantReport r("wigner");
    wigner_checks(s, r);
    return finish(r, s.config(), out / "wigner.json");
}

int cmd_weak(Session& s, const fs::path& out) {
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        const WaveFunction& psi = s.series()[k];
        const WeakValueField w = weak_momentum(psi);
        const BohmOsmoticSplit split = bohm_osmotic_split(psi);
        CsvWriter csv(out / indexed("weak", k), {"x", "re_w", "im_w", "p_bohm", "p_osmotic", "mask"});
        for (Index j = 0; j < psi.size(); ++j) {
            csv.cell(psi.grid().x(j)).cell(w.w[j].real()).cell(w.w[j].imag());
            csv.cell(split.p_bohm[j]).cell(split.p_osmotic[j]).cell(flag(w.mask[j])).end_row();
        }
    }
    InvariantReport r("weak");
    weak_checks(s, r);
    return finish(r, s.config(), out / "weak.json");
}

int cmd_dirac(Session& s, const fs::path& out) {
    {
        CsvWriter csv(out / "dirac.csv", {"kernel", "x", "x0", "eps", "p_final", "p_final_fd", "p_final_gf",
                                          "p_initial", "p_initial_fd", "p_initial_gf", "relative_gap"});
        for (const DiracSample& d : dirac_samples(s.config())) {
            csv.cell(d.kernel).cell(d.x).cell(d.x0).cell(d.eps);
            csv.cell(d.momenta.final_momentum).cell(d.momenta.fd_final_momentum).cell(d.gf_final);
            csv.cell(d.momenta.initial_momentum).cell(d.momenta.fd_initial_momentum).cell(d.gf_initial);
            csv.cell(std::max(d.momenta.max_relative_gap(), d.gf_gap())).end_row();
        }
    }
    InvariantReport r("dirac");
    dirac_checks(s, r);
    return finish(r, s.config(), out / "dirac.json");
}

int cmd_moyal(Session& s, const fs::path& out) {
    for (Index k : s.sample_indices(s.config().wigner_samples)) {
        const WaveFunction& psi = s.series()[k];
        const ConditionalMomentum c = conditional_momentum(wigner(psi));
        const MadelungFields f = decompose(psi, s.config().evolution.mass);
        CsvWriter csv(out / indexed("conditional", k), {"x", "p_conditional", "grad_S", "mask"});
        for (Index j = 0; j < psi.size(); ++j) {
            csv.cell(c.X[j]).cell(c.mean[j]).cell(f.grad_S[j]).cell(flag(c.mask[j] && f.mask[j])).end_row();
        }
    }
    InvariantReport r("moyal-check");
    moyal_checks(s, r);
    return finish(r, s.config(), out / "moyal.json");
}

int cmd_cover(Session& s, const fs::path& out) {
    InvariantReport r("cover-check");
    cover_checks(s, r);
    return finish(r, s.config(), out / "cover.json");
}

int cmd_algebra(Session& s, const fs::path& out) {
    InvariantReport r("algebra-check");
    algebra_checks(r);
    operator_checks(s, r);
    return finish(r, s.config(), out / "algebra.json");
}

int cmd_report(Session& s, const fs::path& out) {
    const CheckToggles& on = s.config().checks;
    InvariantReport r("report");
    if (on.continuity || on.qhj) {
        residual_checks(s, r, on.continuity, on.qhj);
    }
    if (on.weak) {
        weak_checks(s, r);
    }
    if (on.wigner) {
        wigner_checks(s, r);
    }
    if (on.moyal) {
        moyal_checks(s, r);
    }
    if (on.trajectories) {
        trajectory_checks(s, r);
    }
    if (on.dirac) {
        dirac_checks(s, r);
    }
    if (on.cover) {
        cover_checks(s, r);
    }
    if (on.algebra) {
        algebra_checks(r);
    }
    if (on.operators) {
        operator_checks(s, r);
    }
    return finish(r, s.config(), out / "report.json");
}

using Handler = std::function<int(Session&, const fs::path&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table{
        {"evolve", cmd_evolve},     {"trajectories", cmd_trajectories}, {"wigner", cmd_wigner},
        {"weak", cmd_weak},         {"dirac", cmd_dirac},               {"moyal-check", cmd_moyal},
        {"cover-check", cmd_cover}, {"algebra-check", cmd_algebra},     {"report", cmd_report},
    };
    return table;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"evolve", "trajectories", "wigner", "weak", "dirac",
                                                "moyal-check", "cover-check", "algebra-check", "report"};
    return names;
}

int run_command(const std::string& name, const RunConfig& cfg) {
    const auto it = handlers().find(name);
    if (it == handlers().end()) {
        throw ConfigError("unknown command " + name);
    }
    fs::create_directories(cfg.out_dir);
    const auto start = std::chrono::steady_clock::now();
    Session session(cfg);
    const int code = it->second(session, cfg.out_dir);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(cfg.out_dir / ("timing_" + name + ".json"), {{"command", name}, {"wall_seconds", wall}});
    return code;
}

} // namespace qtlab::cli
