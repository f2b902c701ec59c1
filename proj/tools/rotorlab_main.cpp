#include "rotorlab/bessel.hpp"
#include "rotorlab/joint.hpp"
#include "rotorlab/measures.hpp"
#include "rotorlab/numerics.hpp"
#include "rotorlab/spectral.hpp"
#include "rotorlab/states.hpp"
#include "rotorlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace rotorlab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitProperty = 3;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.count, &extra) != 3)
        throw std::invalid_argument("grid: expected lo:hi:n, got '" + text + "'");
    if (g.count < 2)
        throw std::invalid_argument("grid: count must be >= 2");
    if (!(g.lo < g.hi))
        throw std::invalid_argument("grid: bounds must be ordered");
    return g;
}

std::vector<double> make_grid(const GridSpec& g, bool linear) {
    std::vector<double> xs(static_cast<std::size_t>(g.count));
    const bool log_spaced = !linear && g.lo > 0.0;
    for (int i = 0; i < g.count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(g.count - 1);
        xs[static_cast<std::size_t>(i)] =
            log_spaced ? g.lo * std::pow(g.hi / g.lo, t) : g.lo + (g.hi - g.lo) * t;
    }
    return xs;
}

// Files are written to a temporary name and renamed into place, so failures
// never leave partial output behind.
void write_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

std::string with_suffix(const std::string& path, const std::string& tag) {
    std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / p.stem();
    out += "." + tag;
    out += p.extension();
    return out.string();
}

int cmd_curve(const std::string& kind, const GridSpec& grid, bool linear,
              const std::string& out_path, const std::string& format) {
    const std::vector<double> xs = make_grid(grid, linear);
    const std::vector<CurvePoint> points =
        kind == "mathieu" ? mathieu_bound_curve(xs) : von_mises_bound_curve(xs);

    std::ostringstream body;
    if (format == "csv") {
        // the two curve kinds are compared at equal dispersion
        body << "# kind=" << kind << " matching=equal-dispersion\n";
        body << "param,dispersion_sq,product\n";
        for (const CurvePoint& p : points)
            body << fmt17(p.param) << ',' << fmt17(p.dispersion_sq) << ',' << fmt17(p.product)
                 << '\n';
    } else {
        nlohmann::json j;
        j["kind"] = kind;
        j["matching"] = "equal-dispersion";
        j["points"] = nlohmann::json::array();
        for (const CurvePoint& p : points)
            j["points"].push_back({{"param", p.param},
                                   {"dispersion_sq", p.dispersion_sq},
                                   {"product", p.product}});
        body << j.dump(2) << '\n';
    }
    write_atomic(out_path, body.str());
    return kExitOk;
}

int cmd_joint(const std::string& mode_name, const GridSpec& grid, bool linear,
              const std::string& family_name, const std::string& out_path,
              const std::string& format) {
    const JointMode mode = mode_name == "dispersion" ? JointMode::dispersion : JointMode::sine;
    StateFamily family = default_family(mode);
    if (family_name == "mathieu")
        family = StateFamily::mathieu;
    else if (family_name == "vonmises")
        family = StateFamily::vonmises;

    const std::vector<double> xs = make_grid(grid, linear);
    const std::vector<JointCurveRow> rows = bound_curve(xs, mode, family);
    const auto [intersection, sharp] = critical_points(mode, family);

    const std::string family_label = family == StateFamily::mathieu ? "mathieu" : "vonmises";
    std::ostringstream curve, crit;
    if (format == "csv") {
        curve << "# mode=" << mode_name << " family=" << family_label << '\n';
        curve << "ancilla_param,ancilla_D2,branch1,branch2,bound,matched_signal_param,"
                 "min_product,gap\n";
        for (const JointCurveRow& r : rows)
            curve << fmt17(r.ancilla_param) << ',' << fmt17(r.ancilla_d2) << ','
                  << fmt17(r.branch1) << ',' << fmt17(r.branch2) << ',' << fmt17(r.bound) << ','
                  << fmt17(r.matched_signal_param) << ',' << fmt17(r.min_product) << ','
                  << fmt17(r.gap) << '\n';
        crit << "mode,kind,ancilla_param,ancilla_D2,product\n";
        for (const CriticalPoint& c : {intersection, sharp})
            crit << mode_name << ','
                 << (c.kind == CriticalPoint::Kind::intersection ? "intersection" : "sharp")
                 << ',' << fmt17(c.ancilla_param) << ',' << fmt17(c.ancilla_dispersion_sq) << ','
                 << fmt17(c.product) << '\n';
    } else {
        nlohmann::json j;
        j["mode"] = mode_name;
        j["family"] = family_label;
        j["curve"] = nlohmann::json::array();
        for (const JointCurveRow& r : rows)
            j["curve"].push_back({{"ancilla_param", r.ancilla_param},
                                  {"ancilla_D2", r.ancilla_d2},
                                  {"branch1", r.branch1},
                                  {"branch2", r.branch2},
                                  {"bound", r.bound},
                                  {"matched_signal_param", r.matched_signal_param},
                                  {"min_product", r.min_product},
                                  {"gap", r.gap}});
        curve << j.dump(2) << '\n';
        nlohmann::json jc = nlohmann::json::array();
        for (const CriticalPoint& c : {intersection, sharp})
            jc.push_back(
                {{"mode", mode_name},
                 {"kind",
                  c.kind == CriticalPoint::Kind::intersection ? "intersection" : "sharp"},
                 {"ancilla_param", c.ancilla_param},
                 {"ancilla_D2", c.ancilla_dispersion_sq},
                 {"product", c.product}});
        crit << jc.dump(2) << '\n';
    }
    write_atomic(out_path, curve.str());
    write_atomic(with_suffix(out_path, "critical"), crit.str());
    return kExitOk;
}

int cmd_verify(const std::string& suite, int n, std::uint64_t seed) {
    n = std::max(n, 1);
    std::vector<verify::PropertyResult> results;
    if (suite == "hierarchy")
        results = verify::hierarchy_suite(n, seed);
    else if (suite == "saturation")
        results = verify::saturation_suite();
    else if (suite == "inertia")
        results = verify::inertia_suite(n, seed);
    else if (suite == "povm")
        results = verify::povm_suite();
    else
        results = verify::all_suites(n, seed);

    bool all_pass = true;
    for (const verify::PropertyResult& r : results) {
        std::printf("[%s] %-40s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? kExitOk : kExitProperty;
}

struct ParsedState {
    std::string label;
    std::optional<PureState> pure;
    std::optional<Ensemble> ensemble;

    Moments get_moments() const { return pure ? moments(*pure) : moments(*ensemble); }
};

PureState parse_pure(const std::vector<std::string>& tokens, std::size_t& pos,
                     std::optional<int> window_override) {
    if (pos >= tokens.size())
        throw std::invalid_argument("state descriptor: unexpected end");
    const std::string head = tokens[pos];
    const std::size_t colon = head.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("state descriptor: expected name:value, got '" + head + "'");
    const std::string name = head.substr(0, colon);
    const std::string first = head.substr(colon + 1);
    auto take = [&]() {
        if (++pos >= tokens.size())
            throw std::invalid_argument("state descriptor: missing argument for " + name);
        return tokens[pos];
    };
    if (name == "vonmises") {
        const int m = std::stoi(first);
        const double alpha = std::stod(take());
        const double kappa = std::stod(take());
        ++pos;
        if (window_override)
            return von_mises_state(m, alpha, kappa, Window::symmetric(*window_override));
        return von_mises_state(m, alpha, kappa);
    }
    if (name == "momentum") {
        const int l = std::stoi(first);
        ++pos;
        const int h = window_override.value_or(std::max(8, std::abs(l) + 4));
        return momentum_eigenstate(l, Window::symmetric(h));
    }
    if (name == "mathieu") {
        const double q = std::stod(first);
        ++pos;
        if (window_override)
            return mathieu_ground(q, Window::symmetric(*window_override)).state;
        return mathieu_ground(q).state;
    }
    if (name == "file") {
        ++pos;
        std::ifstream in(first, std::ios::binary);
        if (!in)
            throw std::invalid_argument("state descriptor: cannot read file " + first);
        std::ostringstream buf;
        buf << in.rdbuf();
        nlohmann::json j = nlohmann::json::parse(buf.str());
        if (j.contains("state"))
            j = j["state"];
        return state_from_json(j.dump());
    }
    throw std::invalid_argument("state descriptor: unknown kind '" + name + "'");
}

ParsedState parse_state(const std::vector<std::string>& tokens, std::size_t& pos,
                        std::optional<int> window_override) {
    if (pos >= tokens.size())
        throw std::invalid_argument("state descriptor: unexpected end");
    const std::string& head = tokens[pos];
    const std::size_t colon = head.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("state descriptor: expected name:value, got '" + head + "'");
    ParsedState out;
    if (head.substr(0, colon) == "mix") {
        const double p = std::stod(head.substr(colon + 1));
        ++pos;
        PureState first = parse_pure(tokens, pos, window_override);
        PureState second = parse_pure(tokens, pos, window_override);
        Ensemble mix{{{p, std::move(first)}, {1.0 - p, std::move(second)}}};
        mix.validate();
        out.label = "mix";
        out.ensemble = std::move(mix);
        return out;
    }
    out.label = head.substr(0, colon);
    out.pure = parse_pure(tokens, pos, window_override);
    return out;
}

void print_tensor(std::ostream& os, const char* title, const InertiaTensor3& t) {
    os << title << ":\n";
    for (int i = 0; i < 3; ++i) {
        os << "  [";
        for (int j = 0; j < 3; ++j)
            os << (j ? ", " : " ")
               << fmt17(t.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        os << " ]\n";
    }
}

int cmd_state(const std::string& descriptor, std::optional<int> window_override,
              const std::string& format, const std::string& out_path) {
    std::vector<std::string> tokens;
    {
        std::stringstream ss(descriptor);
        std::string tok;
        while (std::getline(ss, tok, ','))
            tokens.push_back(tok);
    }
    std::size_t pos = 0;
    ParsedState st = parse_state(tokens, pos, window_override);
    if (pos != tokens.size())
        throw std::invalid_argument("state descriptor: trailing tokens");

    const Moments m = st.get_moments();
    const HierarchyReport h = hierarchy(m);
    const CovMatrix2 g = covariance_matrix(m);
    const auto [gp, gm] = gamma_pm(m);
    const OptimalAxis oa = optimal_axis_detail(m);
    const InertiaTensor3 io = inertia_tensor(m, InertiaAbout::origin);
    const InertiaTensor3 ig = inertia_tensor(m, InertiaAbout::center_of_mass);

    std::ostringstream os;
    os << "state " << descriptor << "\n";
    os << "mean_l        = " << fmt17(m.mean_l) << "\n";
    os << "mean_l2       = " << fmt17(m.mean_l2) << "\n";
    os << "var_l         = " << fmt17(m.var_l()) << "\n";
    os << "mean_e        = " << fmt17(m.mean_e.real()) << " + " << fmt17(m.mean_e.imag())
       << "i  (|E| = " << fmt17(std::abs(m.mean_e)) << ")\n";
    os << "mean_e2       = " << fmt17(m.mean_e2.real()) << " + " << fmt17(m.mean_e2.imag())
       << "i\n";
    os << "center of mass G = (" << fmt17(m.mean_c()) << ", " << fmt17(m.mean_s()) << ")\n";
    os << "dispersion    = " << fmt17(h.dispersion) << "\n";
    os << "gamma_plus    = " << fmt17(gp) << "\n";
    os << "gamma_minus   = " << fmt17(gm) << "\n";
    os << "mean_axis     = " << fmt17(h.mean_axis) << "\n";
    os << "optimal_axis  = " << fmt17(h.optimal_axis) << "  (axis = [" << fmt17(oa.axis[0])
       << ", " << fmt17(oa.axis[1]) << "])\n";
    os << "ordered       = " << (h.ordered ? "yes" : "no")
       << "  degenerate = " << (h.degenerate ? "yes" : "no") << "\n";
    os << "covariance    : var_s = " << fmt17(g.var_s) << ", var_c = " << fmt17(g.var_c)
       << ", cov_sc = " << fmt17(g.cov_sc) << "\n";
    print_tensor(os, "inertia about origin", io);
    print_tensor(os, "inertia about center of mass", ig);
    if (st.ensemble && st.ensemble->components.size() == 2) {
        const Moments m1 = moments(st.ensemble->components[0].state);
        const Moments m2 = moments(st.ensemble->components[1].state);
        const MixtureCheck mc =
            mixture_composition_check(st.ensemble->components[0].weight, m1, m2, 100);
        os << "mixture tensor residual = " << fmt17(mc.tensor_residual) << "\n";
        os << "mixture concavity slack = " << fmt17(mc.concavity_slack) << "\n";
    }
    std::cout << os.str();

    if (format == "json" || !out_path.empty()) {
        nlohmann::json j;
        j["descriptor"] = descriptor;
        j["mean_l"] = m.mean_l;
        j["mean_l2"] = m.mean_l2;
        j["mean_e"] = {m.mean_e.real(), m.mean_e.imag()};
        j["mean_e2"] = {m.mean_e2.real(), m.mean_e2.imag()};
        j["dispersion"] = h.dispersion;
        j["gamma_plus"] = gp;
        j["gamma_minus"] = gm;
        j["mean_axis"] = h.mean_axis;
        j["optimal_axis"] = h.optimal_axis;
        j["ordered"] = h.ordered;
        j["degenerate"] = h.degenerate;
        if (st.pure)
            j["state"] = nlohmann::json::parse(state_to_json(*st.pure));
        const std::string text = j.dump(2) + "\n";
        if (!out_path.empty())
            write_atomic(out_path, text);
        else
            std::cout << text;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotorlab: uncertainty measures for the planar quantum rotor"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 1;
    int n_samples = 10000;
    int window_flag = 0;
    bool linear = false;

    app.add_option("--out", out_path, "output file path");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "random seed");
    app.add_option("--n", n_samples, "sample count for property suites");
    app.add_option("--window", window_flag, "half-width of the truncation window");
    app.add_flag("--linear", linear, "linear grid spacing even when lo > 0");

    auto* curve = app.add_subcommand("curve", "single-rotor bound curves");
    std::string curve_kind;
    curve->add_option("kind", curve_kind, "mathieu or vonmises")
        ->required()
        ->check(CLI::IsMember({"mathieu", "vonmises"}));
    std::string q_spec, kappa_spec;
    curve->add_option("--q", q_spec, "q grid lo:hi:n");
    curve->add_option("--kappa", kappa_spec, "kappa grid lo:hi:n");

    auto* joint = app.add_subcommand("joint", "simultaneous-measurement curves");
    std::string joint_mode;
    joint->add_option("mode", joint_mode, "dispersion or sine")
        ->required()
        ->check(CLI::IsMember({"dispersion", "sine"}));
    std::string grid_spec;
    joint->add_option("--grid", grid_spec, "ancilla grid lo:hi:n");
    std::string family_name;
    joint->add_option("--family", family_name, "mathieu or vonmises")
        ->check(CLI::IsMember({"mathieu", "vonmises"}));

    auto* verify_cmd = app.add_subcommand("verify", "property suites");
    std::string suite;
    verify_cmd->add_option("suite", suite, "hierarchy|saturation|inertia|povm|all")
        ->required()
        ->check(CLI::IsMember({"hierarchy", "saturation", "inertia", "povm", "all"}));

    auto* state_cmd = app.add_subcommand("state", "inspect a state descriptor");
    std::string descriptor;
    state_cmd
        ->add_option("descriptor", descriptor,
                     "vonmises:m,alpha,kappa | momentum:l | mix:p,d1,d2 | mathieu:q | file:path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (curve->parsed()) {
            if (out_path.empty()) {
                std::cerr << "curve: --out is required\n";
                return kExitUsage;
            }
            std::string spec = curve_kind == "mathieu" ? q_spec : kappa_spec;
            if (spec.empty())
                spec = "1e-3:1e3:200";
            return cmd_curve(curve_kind, parse_grid(spec), linear, out_path, format);
        }
        if (joint->parsed()) {
            if (out_path.empty()) {
                std::cerr << "joint: --out is required\n";
                return kExitUsage;
            }
            std::string spec = grid_spec;
            if (spec.empty())
                spec = joint_mode == "dispersion" ? "5e-1:60:40" : "5e-2:30:40";
            return cmd_joint(joint_mode, parse_grid(spec), linear, family_name, out_path, format);
        }
        if (verify_cmd->parsed())
            return cmd_verify(suite, n_samples, seed);
        if (state_cmd->parsed()) {
            std::optional<int> override_window;
            if (window_flag > 0)
                override_window = window_flag;
            return cmd_state(descriptor, override_window, format, out_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
