#include "roughns/lab.hpp"

#include "roughns/analysis.hpp"
#include "roughns/svg.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace roughns {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

// ---- config plumbing --------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config key '" + path + "': " + msg);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) fail(path + "." + item.key(), "unknown key (the schema is fail-closed)");
    }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  bool required, double fallback = 0.0) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing");
        return fallback;
    }
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& path, const char* key, bool required,
                 long fallback = 0) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing");
        return fallback;
    }
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<long>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       bool required, const std::string& fallback = "") {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing");
        return fallback;
    }
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

SolverConfig parse_solver(const json& j) {
    check_keys(j, "solver",
               {"dim", "trunc", "viscosity", "dt", "horizon", "dealias", "blowup_factor",
                "store_every", "store_states"});
    SolverConfig cfg;
    cfg.dim = static_cast<int>(get_integer(j, "solver", "dim", true));
    cfg.trunc = static_cast<int>(get_integer(j, "solver", "trunc", true));
    cfg.viscosity = get_number(j, "solver", "viscosity", true);
    cfg.dt = get_number(j, "solver", "dt", true);
    cfg.horizon = get_number(j, "solver", "horizon", true);
    cfg.dealias = get_bool(j, "solver", "dealias", true);
    cfg.blowup_factor = get_number(j, "solver", "blowup_factor", false, 1e6);
    cfg.store_every = static_cast<int>(get_integer(j, "solver", "store_every", false, 1));
    cfg.store_states = get_bool(j, "solver", "store_states", true);
    if (cfg.dim != 2 && cfg.dim != 3) fail("solver.dim", "must be 2 or 3");
    if (cfg.trunc < 1 || cfg.trunc > 128) fail("solver.trunc", "must lie in [1,128]");
    if (!(cfg.dt > 0.0)) fail("solver.dt", "must be positive");
    if (cfg.horizon < 0.0) fail("solver.horizon", "must be nonnegative");
    if (cfg.viscosity < 0.0) fail("solver.viscosity", "must be nonnegative");
    return cfg;
}

SpectralField shear_sigma_2d(int which, double amp) {
    SpectralField s = SpectralField::vector(2, 2);
    if (which == 0) { // (amp sin x2, 0)
        int kp[3] = {0, 1, 0}, km[3] = {0, -1, 0};
        s.coef(0, s.index(kp)) = {0.0, -0.5 * amp};
        s.coef(0, s.index(km)) = {0.0, 0.5 * amp};
    } else { // (0, amp cos x1)
        int kp[3] = {1, 0, 0}, km[3] = {-1, 0, 0};
        s.coef(1, s.index(kp)) = {0.5 * amp, 0.0};
        s.coef(1, s.index(km)) = {0.5 * amp, 0.0};
    }
    return s;
}

VectorFieldFamily parse_family(const json& j, int dim, const fs::path& base_dir) {
    check_keys(j, "family", {"file", "text", "preset", "amplitude", "constant"});
    const double amp = get_number(j, "family", "amplitude", false, 1.0);
    if (j.contains("file")) {
        const fs::path p = base_dir / get_string(j, "family", "file", true);
        return read_family_file(p.string());
    }
    if (j.contains("text")) return roughns::parse_family(get_string(j, "family", "text", true));
    if (j.contains("constant")) {
        const auto& c = j["constant"];
        if (!c.is_array() || static_cast<int>(c.size()) != dim)
            fail("family.constant", "expected an array of d numbers");
        SpectralField s = SpectralField::vector(dim, 1);
        for (int i = 0; i < dim; ++i) s.set_mean_value(i, c[static_cast<std::size_t>(i)].get<double>());
        return VectorFieldFamily({s});
    }
    const std::string preset = get_string(j, "family", "preset", true);
    if (preset == "zero") {
        return VectorFieldFamily({SpectralField::vector(dim, 1)});
    }
    if (preset == "shear-pair-2d") {
        if (dim != 2) fail("family.preset", "shear-pair-2d requires d=2");
        return VectorFieldFamily({shear_sigma_2d(0, amp), shear_sigma_2d(1, amp)});
    }
    if (preset == "shear-2d") {
        if (dim != 2) fail("family.preset", "shear-2d requires d=2");
        return VectorFieldFamily({shear_sigma_2d(0, amp)});
    }
    if (preset == "shear-3d") {
        if (dim != 3) fail("family.preset", "shear-3d requires d=3");
        SpectralField s = SpectralField::vector(3, 2);
        int kp[3] = {0, 1, 0}, km[3] = {0, -1, 0};
        s.coef(0, s.index(kp)) = {0.0, -0.5 * amp};
        s.coef(0, s.index(km)) = {0.0, 0.5 * amp};
        int cp[3] = {1, 0, 0}, cm[3] = {-1, 0, 0};
        s.coef(2, s.index(cp)) = {0.5 * amp, 0.0};
        s.coef(2, s.index(cm)) = {0.5 * amp, 0.0};
        return VectorFieldFamily({s});
    }
    fail("family.preset", "unknown preset '" + preset + "'");
}

SpectralField parse_initial(const json& j, const SolverConfig& cfg) {
    check_keys(j, "initial", {"kind", "band", "amplitude", "seed", "modes"});
    const std::string kind = get_string(j, "initial", "kind", true);
    if (kind == "taylor-green") {
        if (cfg.dim != 2) fail("initial.kind", "taylor-green requires d=2");
        return taylor_green_vorticity(cfg.trunc);
    }
    if (kind == "modes") {
        if (!j.contains("modes") || !j["modes"].is_array())
            fail("initial.modes", "expected an array of mode entries");
        SpectralField xi = cfg.dim == 2 ? SpectralField::scalar(2, cfg.trunc)
                                        : SpectralField::vector(3, cfg.trunc);
        for (const auto& m : j["modes"]) {
            check_keys(m, "initial.modes[]", {"k", "re", "im", "comp"});
            if (!m.contains("k") || !m["k"].is_array() ||
                static_cast<int>(m["k"].size()) != cfg.dim)
                fail("initial.modes[].k", "expected a wavevector of d integers");
            int k[3] = {0, 0, 0};
            for (int a = 0; a < cfg.dim; ++a) {
                k[a] = m["k"][static_cast<std::size_t>(a)].get<int>();
                if (std::abs(k[a]) > cfg.trunc)
                    fail("initial.modes[].k", "wavevector outside the truncation band");
            }
            const int comp = static_cast<int>(get_integer(m, "initial.modes[]", "comp",
                                                          cfg.dim == 3, 1)) - 1;
            if (comp < 0 || comp >= xi.comps())
                fail("initial.modes[].comp", "component out of range");
            const std::complex<double> amp{get_number(m, "initial.modes[]", "re", false),
                                           get_number(m, "initial.modes[]", "im", false)};
            int nk[3] = {-k[0], -k[1], -k[2]};
            xi.coef(comp, xi.index(k)) += amp;
            xi.coef(comp, xi.index(nk)) += std::conj(amp);
        }
        xi.remove_mean();
        if (cfg.dim == 3) xi = leray_project(xi);
        return xi;
    }
    if (kind == "random-band") {
        const int band = static_cast<int>(get_integer(j, "initial", "band", true));
        const double amp = get_number(j, "initial", "amplitude", true);
        const auto seed = static_cast<std::uint64_t>(get_integer(j, "initial", "seed", true));
        return random_band_vorticity(cfg.dim, cfg.trunc, band, amp, seed);
    }
    if (kind == "zero") {
        return cfg.dim == 2 ? SpectralField::scalar(2, cfg.trunc)
                            : SpectralField::vector(3, cfg.trunc);
    }
    fail("initial.kind", "unknown kind '" + kind + "'");
}

std::array<double, 3> parse_mean(const json& root, int dim) {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    if (!root.contains("mean")) return mean;
    const auto& m = root["mean"];
    if (!m.is_array() || static_cast<int>(m.size()) != dim)
        fail("mean", "expected an array of d numbers");
    for (int i = 0; i < dim; ++i) mean[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)].get<double>();
    return mean;
}

SamplePath parse_noise(const json& j, int k_dim, double horizon) {
    check_keys(j, "noise", {"kind", "seed", "mesh", "hurst"});
    const std::string kind = get_string(j, "noise", "kind", true);
    const double mesh = get_number(j, "noise", "mesh", kind != "zero", horizon > 0 ? horizon : 1.0);
    const auto seed = static_cast<std::uint64_t>(get_integer(j, "noise", "seed", kind == "brownian" || kind == "fbm" || kind == "smooth"));
    const double span = horizon > 0 ? horizon : mesh;
    if (kind == "brownian") return sample_brownian(seed, mesh, k_dim, span);
    if (kind == "fbm") {
        const double hurst = get_number(j, "noise", "hurst", true);
        return sample_fbm(seed, mesh, k_dim, span, hurst);
    }
    if (kind == "smooth") return sample_smooth(seed, mesh, k_dim, span);
    if (kind == "zero") return sample_zero(mesh, k_dim, span);
    fail("noise.kind", "unknown kind '" + kind + "'");
}

// ---- summary helpers -----------------------------------------------------------

struct CheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation; // "<=", ">=", "in", "true"
    bool pass = false;
};

class SummaryBuilder {
public:
    SummaryBuilder(std::string kind, json config_echo)
        : kind_(std::move(kind)), config_(std::move(config_echo)) {}

    void metric(const std::string& name, double v) { metrics_[name] = v; }
    void metric(const std::string& name, const json& v) { metrics_[name] = v; }

    void check_le(const std::string& name, double value, double threshold) {
        rows_.push_back({name, value, threshold, "<=", value <= threshold});
    }
    void check_ge(const std::string& name, double value, double threshold) {
        rows_.push_back({name, value, threshold, ">=", value >= threshold});
    }
    void check_true(const std::string& name, bool ok) {
        rows_.push_back({name, ok ? 1.0 : 0.0, 1.0, "true", ok});
    }
    void check_window(const std::string& name, double value, double lo, double hi) {
        CheckRow row{name, value, lo, "in", value >= lo && value <= hi};
        rows_.push_back(row);
        window_hi_[name] = hi;
    }

    bool all_pass() const {
        for (const auto& r : rows_)
            if (!r.pass) return false;
        return true;
    }
    std::vector<std::string> failed() const {
        std::vector<std::string> out;
        for (const auto& r : rows_)
            if (!r.pass) out.push_back(r.name);
        return out;
    }

    json build() const {
        json out;
        out["artifact_version"] = kArtifactVersion;
        out["schema_version"] = kSchemaVersion;
        out["kind"] = kind_;
        out["config"] = config_;
        out["config_hash"] = config_hash(config_.dump());
        out["metrics"] = metrics_;
        json checks = json::array();
        for (const auto& r : rows_) {
            json c;
            c["name"] = r.name;
            c["value"] = r.value;
            c["relation"] = r.relation;
            c["threshold"] = r.threshold;
            auto it = window_hi_.find(r.name);
            if (it != window_hi_.end()) c["threshold_high"] = it->second;
            c["pass"] = r.pass;
            checks.push_back(c);
        }
        out["checks"] = checks;
        out["pass"] = all_pass();
        return out;
    }

private:
    std::string kind_;
    json config_;
    json metrics_ = json::object();
    std::vector<CheckRow> rows_;
    std::map<std::string, double> window_hi_;
};

void write_text_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string());
    os << text;
}

void write_trajectory_outputs(const Trajectory& traj, const fs::path& dir, bool fields) {
    traj.write_csv_file((dir / "trajectory.csv").string());
    SvgPlot plot("enstrophy over time", "t", "|xi|^2");
    plot.add_series("enstrophy", traj.times, traj.enstrophy);
    plot.write_file((dir / "enstrophy.svg").string());
    if (fields && !traj.states.empty()) {
        write_field_file(traj.states.front(), (dir / "xi_first.field").string());
        write_field_file(traj.states.back(), (dir / "xi_last.field").string());
    }
}

// ---- experiment kinds -----------------------------------------------------------

void run_solve(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
               const fs::path& dir, SummaryBuilder& sb, bool& numerical_failure) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath noise = parse_noise(root.at("noise"), fam.size(), cfg.horizon);
    const Trajectory traj = solve_vorticity(xi0, mean0, cfg, fam, noise);
    write_trajectory_outputs(traj, dir,
                             root.contains("output") &&
                                 get_bool(root["output"], "output", "fields", false));

    sb.metric("final_enstrophy", traj.enstrophy.back());
    sb.metric("final_time", traj.times.back());
    sb.metric("blowup", traj.blew_up ? 1.0 : 0.0);
    sb.metric("mean_bound_constant", fit_mean_bound_constant(traj, 2.5));

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"exact_decay_tolerance", "expect_completion"});
    const bool expect_completion = get_bool(checks, "checks", "expect_completion", true);
    if (expect_completion && traj.blew_up) numerical_failure = true;
    sb.check_true("completed", !traj.blew_up);

    if (checks.contains("exact_decay_tolerance")) {
        // Taylor-Green eigenmode decay: |xi_t|^2 = e^{-4 nu t} |xi_0|^2
        const double tol = checks["exact_decay_tolerance"].get<double>();
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double expected =
                traj.enstrophy.front() * std::exp(-4.0 * cfg.viscosity * traj.times[i]);
            worst = std::max(worst, std::abs(traj.enstrophy[i] - expected) /
                                        std::max(expected, 1e-300));
        }
        sb.check_le("exact_decay_relative_error", worst, tol);
    }
}

void run_enstrophy(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                   const fs::path& dir, SummaryBuilder& sb, bool& numerical_failure) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath noise = parse_noise(root.at("noise"), fam.size(), cfg.horizon);

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"residual_tolerance", "ratio_window", "enforce_ratio"});
    const double tol = get_number(checks, "checks", "residual_tolerance", false, 1e-6);
    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study", {"dt_halvings"});
    const int halvings = static_cast<int>(get_integer(study, "study", "dt_halvings", false, 0));

    SolverConfig run_cfg = cfg;
    run_cfg.store_states = false;
    std::vector<double> residuals;
    json residual_list = json::array();
    Trajectory first;
    for (int h = 0; h <= halvings; ++h) {
        const Trajectory traj = solve_vorticity(xi0, mean0, run_cfg, fam, noise);
        if (traj.blew_up) {
            numerical_failure = true;
            sb.check_true("completed", false);
            return;
        }
        residuals.push_back(enstrophy_balance_residual(traj, run_cfg.viscosity));
        residual_list.push_back(json{{"dt", run_cfg.dt}, {"residual", residuals.back()}});
        if (h == 0) first = traj;
        run_cfg.dt *= 0.5;
    }
    write_trajectory_outputs(first, dir, false);
    sb.metric("residuals", residual_list);
    sb.check_le("balance_residual", residuals.front(), tol);
    if (halvings >= 1) {
        const double ratio = residuals[0] / std::max(residuals[1], 1e-300);
        sb.metric("dt_halving_ratio", ratio);
        if (checks.contains("ratio_window")) {
            const auto& w = checks["ratio_window"];
            if (!w.is_array() || w.size() != 2) fail("checks.ratio_window", "expected [lo, hi]");
            if (get_bool(checks, "checks", "enforce_ratio", true))
                sb.check_window("dt_halving_ratio", ratio, w[0].get<double>(),
                                w[1].get<double>());
        }
    }

    std::ofstream csv(dir / "residuals.csv");
    csv << "dt,residual\n";
    csv.precision(17);
    double dt = cfg.dt;
    for (double r : residuals) {
        csv << dt << "," << r << "\n";
        dt *= 0.5;
    }
}

void run_movingframe(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                     const fs::path& dir, SummaryBuilder& sb, bool& numerical_failure) {
    if (fam.max_frequency() != 0)
        fail("family", "the moving-frame oracle requires constant fields");
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath noise = parse_noise(root.at("noise"), fam.size(), cfg.horizon);

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"tolerance"});
    const double tol = get_number(checks, "checks", "tolerance", false, 1e-6);

    const Trajectory rough = solve_vorticity(xi0, mean0, cfg, fam, noise);
    VectorFieldFamily zero_fam({SpectralField::vector(cfg.dim, 1)});
    // zero driver over the same breakpoints, so both runs share a step grid
    SamplePath zero_noise;
    zero_noise.k_dim = 1;
    zero_noise.times = noise.times;
    zero_noise.values.assign(noise.times.size(), 0.0);
    const Trajectory det = solve_vorticity(xi0, mean0, cfg, zero_fam, zero_noise);
    if (rough.blew_up || det.blew_up) {
        numerical_failure = true;
        sb.check_true("completed", false);
        return;
    }

    // constant sigma: u_rough(t, x) = u_det(t, x + sigma z_t)
    std::array<double, 3> c{fam.sigma(0).mean_value(0), fam.sigma(0).mean_value(1),
                            cfg.dim == 3 ? fam.sigma(0).mean_value(2) : 0.0};
    double worst = 0.0;
    std::vector<double> errs, ts;
    for (std::size_t i = 0; i < rough.size(); ++i) {
        const double t = rough.times[i];
        const double z = noise.eval(t)[0];
        const auto det_state = det.state_at(det.index_of(t));
        GalerkinState shifted = det_state;
        shifted.xi = phase_shift(det_state.xi, {c[0] * z, c[1] * z, c[2] * z});
        SpectralField du = reconstruct_velocity(rough.state_at(i));
        du -= reconstruct_velocity(shifted);
        const double ref = sobolev_norm(reconstruct_velocity(rough.state_at(i)), 0);
        const double err = sobolev_norm(du, 0) / std::max(ref, 1e-300);
        worst = std::max(worst, err);
        ts.push_back(t);
        errs.push_back(err);
    }
    sb.metric("sup_relative_error", worst);
    sb.check_le("moving_frame_relative_error", worst, tol);

    SvgPlot plot("moving-frame oracle error", "t", "relative C_T H0 error");
    plot.add_series("error", ts, errs);
    plot.write_file((dir / "moving_frame_error.svg").string());
}

void run_wongzakai(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                   const fs::path& dir, SummaryBuilder& sb, bool&) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath reference = parse_noise(root.at("noise"), fam.size(), cfg.horizon);

    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study", {"meshes"});
    if (!study.contains("meshes") || !study["meshes"].is_array() || study["meshes"].size() < 3)
        fail("study.meshes", "at least 3 coarse meshes are required");
    const double ref_mesh = reference.times[1] - reference.times[0];
    std::vector<std::size_t> strides;
    for (const auto& m : study["meshes"]) {
        const double mesh = m.get<double>();
        const double ratio = mesh / ref_mesh;
        const auto stride = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(stride)) > 1e-9 || stride < 2 ||
            (stride & (stride - 1)) != 0)
            fail("study.meshes", "meshes must be dyadic multiples of the reference mesh");
        strides.push_back(stride);
    }

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"final_over_initial", "monotone_slack"});
    const double foi = get_number(checks, "checks", "final_over_initial", false, 1.0 / 3.0);

    const auto studyr = wong_zakai_study(reference, strides, xi0, mean0, cfg, fam);

    json rows = json::array();
    std::vector<double> meshes, c0s;
    std::ofstream csv(dir / "wong_zakai.csv");
    csv << "mesh,c0_h0_distance,l2_h1_distance\n";
    csv.precision(17);
    for (const auto& r : studyr.rows) {
        rows.push_back(json{{"mesh", r.mesh},
                            {"c0_h0_distance", r.c0_h0_distance},
                            {"l2_h1_distance", r.l2_h1_distance}});
        csv << r.mesh << "," << r.c0_h0_distance << "," << r.l2_h1_distance << "\n";
        meshes.push_back(r.mesh);
        c0s.push_back(r.c0_h0_distance);
    }
    sb.metric("rows", rows);
    sb.metric("final_over_initial", studyr.final_over_initial);
    sb.check_true("distances_nonincreasing", studyr.monotone);
    sb.check_le("final_over_initial", studyr.final_over_initial, foi);

    SvgPlot plot("driver interpolation refinement", "mesh", "C_T H0 distance", true, true);
    plot.add_series("C_T H0", meshes, c0s);
    plot.write_file((dir / "wong_zakai.svg").string());
}

void run_stability(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                   const fs::path& dir, SummaryBuilder& sb, bool&) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath noise = parse_noise(root.at("noise"), fam.size(), cfg.horizon);

    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study", {"mode", "epsilons", "perturbation_seed"});
    const std::string mode = get_string(study, "study", "mode", false, "driver");
    std::vector<double> eps;
    if (study.contains("epsilons"))
        for (const auto& e : study["epsilons"]) eps.push_back(e.get<double>());
    if (eps.empty()) eps = {1e-1, 1e-2, 1e-3};

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"linearity_factor"});

    StabilityStudy result;
    if (mode == "driver") {
        result = driver_stability_study(noise, eps, xi0, mean0, cfg, fam);
        sb.check_true("distances_decreasing", result.distances_decreasing);
    } else if (mode == "initial") {
        const auto seed = static_cast<std::uint64_t>(
            get_integer(study, "study", "perturbation_seed", false, 1));
        result = initial_condition_stability_study(noise, eps, xi0, mean0, cfg, fam, seed);
        const double factor = get_number(checks, "checks", "linearity_factor", false, 3.0);
        sb.check_le("linearity_spread", result.linearity_spread, factor);
        sb.check_true("gronwall_constant_finite",
                      std::isfinite(result.gronwall_constant) && result.gronwall_constant > 0);
        sb.metric("gronwall_constant", result.gronwall_constant);
    } else {
        fail("study.mode", "expected 'driver' or 'initial'");
    }

    json rows = json::array();
    std::ofstream csv(dir / "stability.csv");
    csv << "epsilon,driver_distance,solution_distance\n";
    csv.precision(17);
    for (const auto& r : result.rows) {
        rows.push_back(json{{"epsilon", r.perturbation},
                            {"driver_distance", r.driver_distance},
                            {"solution_distance", r.solution_distance}});
        csv << r.perturbation << "," << r.driver_distance << "," << r.solution_distance
            << "\n";
    }
    sb.metric("rows", rows);
}

void run_remainder(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                   const fs::path& dir, SummaryBuilder& sb, bool&) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);

    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study", {"strides", "truncation_factor"});
    std::vector<std::size_t> strides;
    if (study.contains("strides"))
        for (const auto& s : study["strides"]) strides.push_back(s.get<std::size_t>());
    if (strides.empty()) strides = {64, 32, 16, 8, 4, 2};
    const int tfac = static_cast<int>(get_integer(study, "study", "truncation_factor", false, 2));

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"min_slope", "truncation_tolerance"});
    const double min_slope = get_number(checks, "checks", "min_slope", false, 2.8);
    const double gate_tol = get_number(checks, "checks", "truncation_tolerance", false, 0.05);

    SolverConfig run_cfg = cfg;
    run_cfg.store_every = 1;
    run_cfg.store_states = true;

    auto run_level = [&](int trunc) {
        SolverConfig c = run_cfg;
        c.trunc = trunc;
        const SpectralField xi_init = retruncate(xi0, trunc);
        const SamplePath noise = parse_noise(root.at("noise"), fam.size(), c.horizon);
        const Trajectory traj = solve_vorticity(xi_init, mean0, c, fam, noise);
        if (traj.blew_up) throw std::runtime_error("remainder study: run blew up");
        RoughPathLift lift(noise);
        RemainderStudy studyr(traj, fam, lift);
        return studyr.level_means(strides);
    };

    const auto base = run_level(cfg.trunc);
    const auto fine = run_level(cfg.trunc * tfac);
    const double slope = RemainderStudy::fit_slope(base);

    double gate_change = 0.0;
    for (std::size_t i = 0; i < base.size() && i < fine.size(); ++i)
        gate_change = std::max(gate_change, std::abs(base[i].mean_norm - fine[i].mean_norm) /
                                                std::max(fine[i].mean_norm, 1e-300));

    json rows = json::array();
    std::vector<double> hs, norms;
    std::ofstream csv(dir / "remainder_levels.csv");
    csv << "interval,mean_norm,count,mean_norm_fine\n";
    csv.precision(17);
    for (std::size_t i = 0; i < base.size(); ++i) {
        rows.push_back(json{{"interval", base[i].interval},
                            {"mean_norm", base[i].mean_norm},
                            {"count", base[i].count},
                            {"mean_norm_fine", i < fine.size() ? fine[i].mean_norm : 0.0}});
        csv << base[i].interval << "," << base[i].mean_norm << "," << base[i].count << ","
            << (i < fine.size() ? fine[i].mean_norm : 0.0) << "\n";
        hs.push_back(base[i].interval);
        norms.push_back(base[i].mean_norm);
    }
    sb.metric("levels", rows);
    sb.metric("slope", slope);
    sb.metric("truncation_change", gate_change);
    sb.check_ge("remainder_slope", slope, min_slope);
    sb.check_le("truncation_change", gate_change, gate_tol);

    SvgPlot plot("remainder scaling", "interval", "mean remainder norm", true, true);
    plot.add_series("|remainder|_{-2}", hs, norms);
    plot.write_file((dir / "remainder_scaling.svg").string());
}

void run_pressure(const json& root, const SolverConfig& cfg, const VectorFieldFamily& fam,
                  const fs::path& dir, SummaryBuilder& sb, bool&) {
    const SpectralField xi0 = parse_initial(root.at("initial"), cfg);
    const auto mean0 = parse_mean(root, cfg.dim);
    const SamplePath noise = parse_noise(root.at("noise"), fam.size(), cfg.horizon);

    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study", {"stride", "tolerance"});
    const auto stride = static_cast<std::size_t>(get_integer(study, "study", "stride", false, 256));
    const double tol = get_number(study, "study", "tolerance", false, 5e-9);

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"leray_tolerance", "additivity_tolerance"});
    const double leray_tol = get_number(checks, "checks", "leray_tolerance", false, 1e-10);
    const double add_tol = get_number(checks, "checks", "additivity_tolerance", false, 1e-10);

    SolverConfig run_cfg = cfg;
    run_cfg.store_every = 1;
    run_cfg.store_states = true;
    const Trajectory traj = solve_vorticity(xi0, mean0, run_cfg, fam, noise);
    RoughPathLift lift(noise);
    const auto rec = pressure_recovery(traj, fam, lift, stride, tol);

    sb.metric("max_leray_residual", rec.max_leray_residual);
    sb.metric("max_cauchy_difference", rec.max_cauchy_difference);
    sb.metric("additivity_defect", rec.additivity_defect);
    sb.check_le("gradient_sector_residual", rec.max_leray_residual, leray_tol);
    sb.check_le("sewing_additivity", rec.additivity_defect, add_tol);
    sb.check_true("sewing_converged", rec.sewing_converged);

    std::ofstream csv(dir / "pressure_norms.csv");
    csv << "t,pressure_h0_norm\n";
    csv.precision(17);
    std::vector<double> ts, norms;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double n = sobolev_norm(rec.pressure[i], 0);
        csv << rec.times[i] << "," << n << "\n";
        ts.push_back(rec.times[i]);
        norms.push_back(n);
    }
    SvgPlot plot("recovered pressure path", "t", "|pi_t|_0");
    plot.add_series("|pi|", ts, norms);
    plot.write_file((dir / "pressure.svg").string());
}

void run_tstar(const json& root, const fs::path& dir, SummaryBuilder& sb, bool&) {
    json study = root.contains("study") ? root["study"] : json::object();
    check_keys(study, "study",
               {"g0", "growth", "interp", "young", "p", "q", "mean0_abs", "g0_sequence"});
    HorizonConstants c;
    c.growth = get_number(study, "study", "growth", false, 1.0);
    c.interp = get_number(study, "study", "interp", false, 1.0);
    c.young = get_number(study, "study", "young", false, 1.0);
    c.p = get_number(study, "study", "p", false, 2.5);
    c.q = get_number(study, "study", "q", false, 2.0);
    c.mean0_abs = get_number(study, "study", "mean0_abs", false, 0.0);
    const double g0 = get_number(study, "study", "g0", false, 0.1);

    json checks = root.contains("checks") ? root["checks"] : json::object();
    check_keys(checks, "checks", {"oracle_tolerance"});
    const double tol = get_number(checks, "checks", "oracle_tolerance", false, 0.01);

    const double quad = tstar_estimate(g0, c);
    const double ode = tstar_ode_oracle(g0, c);
    sb.metric("tstar_quadrature", quad);
    sb.metric("tstar_ode_oracle", ode);
    const double rel = std::abs(quad - ode) / std::max(ode, 1e-300);
    sb.check_le("oracle_relative_difference", rel, tol);

    // monotone growth of the horizon as the data shrinks
    bool monotone = true;
    json seq = json::array();
    double prev = 0.0;
    std::vector<double> g0s{g0, g0 / 2, g0 / 4, g0 / 8};
    if (study.contains("g0_sequence")) {
        g0s.clear();
        for (const auto& g : study["g0_sequence"]) g0s.push_back(g.get<double>());
    }
    std::sort(g0s.begin(), g0s.end(), std::greater<double>());
    for (double g : g0s) {
        const double t = tstar_estimate(g, c);
        seq.push_back(json{{"g0", g}, {"tstar", t}});
        if (t < prev) monotone = false;
        prev = t;
    }
    sb.metric("g0_sequence", seq);
    sb.check_true("horizon_monotone_in_data", monotone);

    std::ofstream csv(dir / "tstar.csv");
    csv << "g0,tstar\n";
    csv.precision(17);
    for (const auto& row : seq)
        csv << row["g0"].get<double>() << "," << row["tstar"].get<double>() << "\n";
}

// ---- driver ----------------------------------------------------------------------

ExperimentOutcome run_experiment_parsed(const json& root, const fs::path& base_dir,
                                        const std::string& output_root) {
    check_keys(root, "(root)",
               {"schema_version", "kind", "solver", "initial", "mean", "family", "noise",
                "output", "checks", "study"});
    const long schema = get_integer(root, "(root)", "schema_version", true);
    if (schema != kSchemaVersion) fail("schema_version", "unsupported schema version");
    const std::string kind = get_string(root, "(root)", "kind", true);

    const bool needs_solver = kind != "tstar";
    SolverConfig cfg;
    VectorFieldFamily fam;
    if (needs_solver) {
        if (!root.contains("solver")) fail("solver", "missing");
        cfg = parse_solver(root["solver"]);
        if (!root.contains("family")) fail("family", "missing");
        fam = parse_family(root["family"], cfg.dim, base_dir);
        if (!root.contains("initial")) fail("initial", "missing");
        if (!root.contains("noise")) fail("noise", "missing");
    }

    fs::path dir;
    {
        json out = root.contains("output") ? root["output"] : json::object();
        check_keys(out, "output", {"directory", "fields"});
        std::string d = get_string(out, "output", "directory", false, "out");
        const char* env_root = std::getenv("ROUGHNS_OUTPUT_ROOT");
        fs::path base = !output_root.empty()
                            ? fs::path(output_root)
                            : (env_root != nullptr ? fs::path(env_root) : fs::path("."));
        dir = fs::path(d).is_absolute() ? fs::path(d) : base / d;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
    }

    SummaryBuilder sb(kind, root);
    bool numerical_failure = false;
    if (kind == "solve")
        run_solve(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "enstrophy")
        run_enstrophy(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "movingframe")
        run_movingframe(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "wongzakai")
        run_wongzakai(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "stability")
        run_stability(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "remainder")
        run_remainder(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "pressure")
        run_pressure(root, cfg, fam, dir, sb, numerical_failure);
    else if (kind == "tstar")
        run_tstar(root, dir, sb, numerical_failure);
    else
        fail("kind", "unknown experiment kind '" + kind + "'");

    ExperimentOutcome outcome;
    outcome.pass = sb.all_pass();
    outcome.failed_checks = sb.failed();
    const json summary = sb.build();
    const fs::path spath = dir / "summary.json";
    write_text_file(spath, summary.dump(2) + "\n");
    outcome.summary_path = spath.string();
    outcome.exit_code = numerical_failure ? 3 : (outcome.pass ? 0 : 1);
    if (numerical_failure) outcome.message = "numerical failure (unexpected blow-up)";
    return outcome;
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line/column anchor
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
}

} // namespace

std::string config_hash(const std::string& canonical_text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

ExperimentOutcome run_experiment_text(const std::string& config_json,
                                      const std::string& output_root) {
    try {
        const json root = parse_json_text(config_json);
        return run_experiment_parsed(root, fs::current_path(), output_root);
    } catch (const ConfigError& e) {
        ExperimentOutcome out;
        out.exit_code = 2;
        out.message = e.what();
        return out;
    } catch (const std::exception& e) {
        ExperimentOutcome out;
        out.exit_code = 3;
        out.message = e.what();
        return out;
    }
}

ExperimentOutcome run_experiment_file(const std::string& config_path,
                                      const std::string& output_root) {
    std::ifstream is(config_path);
    if (!is) {
        ExperimentOutcome out;
        out.exit_code = 2;
        out.message = "cannot open config file " + config_path;
        return out;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    try {
        const json root = parse_json_text(ss.str());
        return run_experiment_parsed(root, fs::path(config_path).parent_path(), output_root);
    } catch (const ConfigError& e) {
        ExperimentOutcome out;
        out.exit_code = 2;
        out.message = e.what();
        return out;
    } catch (const std::exception& e) {
        ExperimentOutcome out;
        out.exit_code = 3;
        out.message = e.what();
        return out;
    }
}

void validate_config_text(const std::string& config_json) {
    const json root = parse_json_text(config_json);
    check_keys(root, "(root)",
               {"schema_version", "kind", "solver", "initial", "mean", "family", "noise",
                "output", "checks", "study"});
    const long schema = get_integer(root, "(root)", "schema_version", true);
    if (schema != kSchemaVersion) fail("schema_version", "unsupported schema version");
    const std::string kind = get_string(root, "(root)", "kind", true);
    const std::vector<std::string> kinds{"solve",     "enstrophy", "movingframe",
                                         "wongzakai", "stability", "remainder",
                                         "pressure",  "tstar"};
    bool known = false;
    for (const auto& k : kinds) known = known || k == kind;
    if (!known) fail("kind", "unknown experiment kind '" + kind + "'");
    if (kind != "tstar") {
        if (!root.contains("solver")) fail("solver", "missing");
        parse_solver(root["solver"]);
        if (!root.contains("initial")) fail("initial", "missing");
        if (!root.contains("family")) fail("family", "missing");
        if (!root.contains("noise")) fail("noise", "missing");
        check_keys(root["noise"], "noise", {"kind", "seed", "mesh", "hurst"});
        if (kind == "wongzakai") {
            if (!root.contains("study") || !root["study"].contains("meshes") ||
                !root["study"]["meshes"].is_array() || root["study"]["meshes"].size() < 3)
                fail("study.meshes", "at least 3 coarse meshes are required");
        }
    }
}

void validate_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    validate_config_text(ss.str());
}

// ---- presets ---------------------------------------------------------------------

namespace {

struct PresetEntry {
    PresetInfo info;
    const char* text;
};

const PresetEntry kPresets[] = {
    {{"taylor-green-2d",
      "viscous eigenmode decay of the Taylor-Green vortex against the closed form"},
     R"({
  "schema_version": 1,
  "kind": "solve",
  "solver": {"dim": 2, "trunc": 16, "viscosity": 0.01, "dt": 0.001, "horizon": 1.0,
             "dealias": true, "store_every": 25, "store_states": false},
  "initial": {"kind": "taylor-green"},
  "family": {"preset": "zero"},
  "noise": {"kind": "zero", "mesh": 1.0},
  "checks": {"exact_decay_tolerance": 1e-8},
  "output": {"directory": "out/taylor-green-2d"}
})"},
    {{"enstrophy-bm-2d",
      "enstrophy balance under Brownian transport noise with a dt-refinement study"},
     R"({
  "schema_version": 1,
  "kind": "enstrophy",
  "solver": {"dim": 2, "trunc": 32, "viscosity": 0.01, "dt": 0.00048828125, "horizon": 0.5,
             "dealias": true, "store_every": 64, "store_states": false},
  "initial": {"kind": "random-band", "band": 6, "amplitude": 1.0, "seed": 11},
  "family": {"preset": "shear-pair-2d", "amplitude": 0.3},
  "noise": {"kind": "brownian", "seed": 7, "mesh": 0.0009765625},
  "study": {"dt_halvings": 1},
  "checks": {"residual_tolerance": 1e-6},
  "output": {"directory": "out/enstrophy-bm-2d"}
})"},
    {{"wong-zakai-2d",
      "convergence of solutions under dyadic refinement of the Brownian interpolation"},
     R"({
  "schema_version": 1,
  "kind": "wongzakai",
  "solver": {"dim": 2, "trunc": 32, "viscosity": 0.01, "dt": 0.00048828125, "horizon": 0.5,
             "dealias": true, "store_every": 16, "store_states": true},
  "initial": {"kind": "random-band", "band": 6, "amplitude": 1.0, "seed": 11},
  "family": {"preset": "shear-pair-2d", "amplitude": 0.4},
  "noise": {"kind": "brownian", "seed": 7, "mesh": 0.0009765625},
  "study": {"meshes": [0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125]},
  "checks": {"final_over_initial": 0.3333333333333333},
  "output": {"directory": "out/wong-zakai-2d"}
})"},
    {{"moving-frame-2d",
      "constant-field transport noise against the shifted deterministic flow"},
     R"({
  "schema_version": 1,
  "kind": "movingframe",
  "solver": {"dim": 2, "trunc": 32, "viscosity": 0.01, "dt": 0.001, "horizon": 0.5,
             "dealias": true, "store_every": 25, "store_states": true},
  "initial": {"kind": "taylor-green"},
  "family": {"constant": [1.0, 0.5]},
  "noise": {"kind": "brownian", "seed": 5, "mesh": 0.015625},
  "checks": {"tolerance": 1e-6},
  "output": {"directory": "out/moving-frame-2d"}
})"},
    {{"local-3d", "small-data 3d local solve with transport noise (no blow-up expected)"},
     R"({
  "schema_version": 1,
  "kind": "solve",
  "solver": {"dim": 3, "trunc": 8, "viscosity": 0.1, "dt": 0.001953125, "horizon": 0.5,
             "dealias": true, "store_every": 16, "store_states": false},
  "initial": {"kind": "random-band", "band": 2, "amplitude": 0.1, "seed": 29},
  "family": {"preset": "shear-3d", "amplitude": 0.5},
  "noise": {"kind": "brownian", "seed": 13, "mesh": 0.0078125},
  "checks": {"expect_completion": true},
  "output": {"directory": "out/local-3d"}
})"},
    {{"tstar-3d", "3d continuation-horizon estimate against the blow-up comparison solve"},
     R"({
  "schema_version": 1,
  "kind": "tstar",
  "study": {"g0": 0.1, "growth": 1.0, "interp": 1.0, "young": 1.0, "p": 2.5, "q": 2.0,
            "mean0_abs": 0.0},
  "checks": {"oracle_tolerance": 0.01},
  "output": {"directory": "out/tstar-3d"}
})"},
    {{"pressure-2d", "sewing-based pressure recovery in the gradient sector"},
     R"({
  "schema_version": 1,
  "kind": "pressure",
  "solver": {"dim": 2, "trunc": 8, "viscosity": 0.02, "dt": 0.000244140625, "horizon": 0.25,
             "dealias": true, "store_every": 1, "store_states": true},
  "initial": {"kind": "random-band", "band": 4, "amplitude": 1.0, "seed": 23},
  "family": {"preset": "shear-2d", "amplitude": 0.15},
  "noise": {"kind": "smooth", "seed": 11, "mesh": 0.000244140625},
  "study": {"stride": 512, "tolerance": 5e-9},
  "checks": {"leray_tolerance": 1e-10, "additivity_tolerance": 1e-10},
  "output": {"directory": "out/pressure-2d"}
})"},
    {{"remainder-scaling-2d",
      "rough-expansion remainder scaling in the interval size, with a truncation gate"},
     R"({
  "schema_version": 1,
  "kind": "remainder",
  "solver": {"dim": 2, "trunc": 16, "viscosity": 0.0, "dt": 0.0009765625, "horizon": 0.5,
             "dealias": true, "store_every": 1, "store_states": true},
  "initial": {"kind": "random-band", "band": 4, "amplitude": 0.05, "seed": 13},
  "family": {"preset": "shear-pair-2d", "amplitude": 1.0},
  "noise": {"kind": "smooth", "seed": 7, "mesh": 0.0009765625},
  "study": {"strides": [64, 32, 16, 8, 4, 2], "truncation_factor": 2},
  "checks": {"min_slope": 2.8, "truncation_tolerance": 0.05},
  "output": {"directory": "out/remainder-scaling-2d"}
})"},
};

} // namespace

const std::vector<PresetInfo>& experiment_presets() {
    static const std::vector<PresetInfo> infos = [] {
        std::vector<PresetInfo> v;
        for (const auto& p : kPresets) v.push_back(p.info);
        return v;
    }();
    return infos;
}

std::string preset_config_text(const std::string& name) {
    for (const auto& p : kPresets)
        if (p.info.name == name) return p.text;
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace roughns
