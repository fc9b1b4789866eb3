// Single-file JSON configuration for the batch tool. A config carries six
// blocks (physical, grid, initial, run, envelope, verify); every field has a
// default, so the empty object is already a valid run. Parsing is strict:
// unknown keys and type mismatches fail with the offending field path, and
// semantic rules that span blocks (exact-resonance mode needs a gapless
// dispersion, power-law initial data must keep the mass integral finite)
// are enforced at load time rather than when the run finally trips on them.
//
// Loading materializes the defaults, so parse -> serialize -> parse is the
// identity and the serialized form is canonical: key order is alphabetic,
// doubles print in shortest round-trip form. The FNV-1a hash of that string
// is what output files embed to tie results back to the exact configuration.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evolution.hpp"
#include "io.hpp"
#include "physics.hpp"
#include "spectrum.hpp"
#include "verify.hpp"

namespace wavekin {

struct GridConfig {
    double r_min = 0.0;
    double r_max = 8.0;
    std::size_t n = 128;
    GridSpacing spacing = GridSpacing::uniform;

    void validate() const {
        if (!(r_min >= 0.0)) throw std::invalid_argument("grid.r_min must be >= 0");
        if (!(r_max > r_min)) throw std::invalid_argument("grid.r_max must exceed grid.r_min");
        if (n < 8) throw std::invalid_argument("grid.n must be >= 8");
        if (spacing == GridSpacing::logarithmic && !(r_min > 0.0)) {
            throw std::invalid_argument("grid.spacing=logarithmic requires grid.r_min > 0");
        }
    }
};

enum class InitialKind { gaussian_bump, power_law, spectrum_file };

// Parameters for the built-in initial conditions. Only the fields relevant
// to the active kind are meaningful (and serialized): amplitude/center/width
// for the Gaussian, amplitude/exponent/r_inner/r_outer for the power law,
// and the file path when the spectrum is read from disk. r_outer = 0 stands
// for "out to the grid edge" and is replaced by r_max at load time.
struct InitialConfig {
    InitialKind kind = InitialKind::gaussian_bump;
    double amplitude = 1.0;
    double center = 2.0;
    double width = 0.5;
    double exponent = 1.0;
    double r_inner = 0.0;
    double r_outer = 0.0;
    std::string spectrum_file;

    void validate() const {
        if (!(amplitude >= 0.0)) throw std::invalid_argument("initial.amplitude must be >= 0");
        switch (kind) {
            case InitialKind::gaussian_bump:
                if (!(width > 0.0)) throw std::invalid_argument("initial.width must be > 0");
                break;
            case InitialKind::power_law:
                if (!(r_inner >= 0.0)) throw std::invalid_argument("initial.r_inner must be >= 0");
                if (r_outer != 0.0 && !(r_outer > r_inner)) {
                    throw std::invalid_argument("initial.r_outer must exceed initial.r_inner");
                }
                // r^{2-p} must stay integrable at the origin for the mass to
                // exist; away from r = 0 any exponent is fine.
                if (r_inner == 0.0 && exponent >= 3.0) {
                    throw std::invalid_argument(
                        "initial.exponent: power_law mass diverges; the exponent must be < 3 "
                        "when the support reaches r = 0");
                }
                break;
            case InitialKind::spectrum_file:
                if (spectrum_file.empty()) {
                    throw std::invalid_argument("initial.spectrum_file must be a nonempty path");
                }
                break;
        }
    }
};

// Envelope radii for the invariant-set construction; 0 means "choose
// automatically" (the JSON form spells that "auto").
struct EnvelopeConfig {
    double r0 = 0.0;
    double r_lower = 0.0;
    double r_upper = 0.0;

    void validate() const {
        if (!(r0 >= 0.0)) throw std::invalid_argument("envelope.R0 must be \"auto\" or >= 0");
        if (!(r_lower >= 0.0)) {
            throw std::invalid_argument("envelope.R_lower must be \"auto\" or >= 0");
        }
        if (!(r_upper >= 0.0)) {
            throw std::invalid_argument("envelope.R_upper must be \"auto\" or >= 0");
        }
    }
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "all",    "attenuation", "gain_moment",  "holder",
        "ledger", "gamma_limit", "exact_energy", "stability"};
    return names;
}

inline void validate_suite_name(const std::string& suite) {
    for (const auto& name : suite_names()) {
        if (suite == name) return;
    }
    std::string msg = "verify.suite must be one of";
    for (const auto& name : suite_names()) msg += " " + name;
    msg += "; got \"" + suite + "\"";
    throw std::invalid_argument(msg);
}

struct VerifyConfig {
    std::string suite = "all";
    std::size_t count = 50;       // samples for the single-spectrum checks
    std::size_t pair_count = 100; // pairs for the continuity checks
    std::uint64_t seed = 0;
    double amplitude_min = 0.1;
    double amplitude_max = 2.0;
    double bump_fraction = 0.5;
    double mass_floor = 0.1;
    double norm_ceiling = 1e7;
    std::vector<double> scales = {1e-1, 1e-2, 1e-3};

    void validate() const {
        validate_suite_name(suite);
        if (count == 0) throw std::invalid_argument("verify.count must be >= 1");
        if (pair_count == 0) throw std::invalid_argument("verify.pair_count must be >= 1");
        if (!(amplitude_min > 0.0 && amplitude_max >= amplitude_min)) {
            throw std::invalid_argument(
                "verify.amplitude_min/amplitude_max must satisfy 0 < min <= max");
        }
        if (!(bump_fraction >= 0.0 && bump_fraction <= 1.0)) {
            throw std::invalid_argument("verify.bump_fraction must lie in [0, 1]");
        }
        if (!(mass_floor > 0.0)) throw std::invalid_argument("verify.mass_floor must be > 0");
        if (!(norm_ceiling > 0.0)) {
            throw std::invalid_argument("verify.norm_ceiling must be > 0");
        }
        if (scales.size() < 2) {
            throw std::invalid_argument("verify.scales needs at least two entries");
        }
        for (std::size_t i = 0; i < scales.size(); ++i) {
            if (!(scales[i] > 0.0) || (i > 0 && !(scales[i] < scales[i - 1]))) {
                throw std::invalid_argument(
                    "verify.scales must be positive and strictly decreasing");
            }
        }
    }
};

struct ConfigFile {
    PhysicalParams physical;
    GridConfig grid;
    InitialConfig initial;
    RunConfig run; // run.params mirrors the physical block after load
    EnvelopeConfig envelope;
    VerifyConfig verify;

    // Directory of the file this config was loaded from; spectrum_file paths
    // resolve against it. Not part of the serialized form.
    std::filesystem::path base_dir = ".";

    void validate() const {
        physical.validate();
        grid.validate();
        initial.validate();
        run.validate();
        envelope.validate();
        verify.validate();
        if (run.mode == RunMode::exact_resonance && physical.lambda1 > 0.0) {
            throw std::invalid_argument(
                "run.mode: empty resonant manifold: a dispersion gap admits no colinear "
                "resonances (exact_resonance needs physical.lambda1 = 0)");
        }
        if (run.mode == RunMode::exact_resonance &&
            grid.spacing != GridSpacing::uniform) {
            throw std::invalid_argument("run.mode=exact_resonance needs grid.spacing=uniform");
        }
    }

    GridPtr make_grid() const {
        return std::make_shared<const RadialGrid>(
            build_grid(grid.r_min, grid.r_max, grid.n, grid.spacing));
    }

    SampleFamily sample_family(GridPtr g) const {
        SampleFamily fam;
        fam.count = verify.count;
        fam.grid = std::move(g);
        fam.amplitude_min = verify.amplitude_min;
        fam.amplitude_max = verify.amplitude_max;
        fam.bump_fraction = verify.bump_fraction;
        fam.mass_floor = verify.mass_floor;
        fam.norm_ceiling = verify.norm_ceiling;
        fam.order = run.order;
        fam.seed = verify.seed;
        return fam;
    }
};

// f(r) = A exp(-(r - r0)^2 / sigma^2) on the whole grid, or
// f(r) = A r^{-p} restricted to [r_a, r_b]. The r = 0 node of a power law
// with 0 < p < 3 is set to 0: its volume weight vanishes, and the mass
// integral r^{2-p} dr is finite there, so the limit value is immaterial.
inline Spectrum preset_spectrum(const std::string& name, const InitialConfig& params,
                                const GridPtr& grid) {
    if (!grid) throw std::invalid_argument("preset_spectrum requires a grid");
    InitialConfig local = params;
    if (name == "gaussian_bump") {
        local.kind = InitialKind::gaussian_bump;
    } else if (name == "power_law") {
        local.kind = InitialKind::power_law;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    local.validate();

    const std::size_t n = grid->nodes.size();
    std::vector<double> values(n, 0.0);
    if (local.kind == InitialKind::gaussian_bump) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = grid->nodes[i] - local.center;
            values[i] = local.amplitude * std::exp(-(d * d) / (local.width * local.width));
        }
    } else {
        const double upper = local.r_outer > 0.0 ? local.r_outer : grid->r_max();
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid->nodes[i];
            if (r < local.r_inner || r > upper) continue;
            if (r == 0.0) continue;
            values[i] = local.amplitude * std::pow(r, -local.exponent);
        }
    }
    return make_spectrum(grid, std::move(values));
}

namespace detail {

[[noreturn]] inline void config_type_error(const std::string& path, const char* want) {
    throw std::invalid_argument("config field " + path + " must be " + want);
}

inline void reject_unknown_keys(const nlohmann::json& block, const std::string& prefix,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : block.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument("unknown config field: " + prefix + item.key());
        }
    }
}

inline void read_number(const nlohmann::json& block, const std::string& prefix, const char* key,
                        double& out) {
    if (!block.contains(key)) return;
    const auto& v = block.at(key);
    if (!v.is_number()) config_type_error(prefix + key, "a number");
    out = v.get<double>();
}

inline void read_index(const nlohmann::json& block, const std::string& prefix, const char* key,
                       std::size_t& out) {
    if (!block.contains(key)) return;
    const auto& v = block.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        config_type_error(prefix + key, "a nonnegative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        config_type_error(prefix + key, "a nonnegative integer");
    }
    out = v.get<std::size_t>();
}

inline void read_seed(const nlohmann::json& block, const std::string& prefix, const char* key,
                      std::uint64_t& out) {
    std::size_t tmp = 0;
    if (!block.contains(key)) return;
    read_index(block, prefix, key, tmp);
    out = tmp;
}

inline void read_string(const nlohmann::json& block, const std::string& prefix, const char* key,
                        std::string& out) {
    if (!block.contains(key)) return;
    const auto& v = block.at(key);
    if (!v.is_string()) config_type_error(prefix + key, "a string");
    out = v.get<std::string>();
}

// Envelope radii accept the literal "auto" (stored as 0) or a number.
inline void read_auto_radius(const nlohmann::json& block, const std::string& prefix,
                             const char* key, double& out) {
    if (!block.contains(key)) return;
    const auto& v = block.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() != "auto") {
            config_type_error(prefix + key, "\"auto\" or a number");
        }
        out = 0.0;
        return;
    }
    if (!v.is_number()) config_type_error(prefix + key, "\"auto\" or a number");
    out = v.get<double>();
}

inline const nlohmann::json& block_or_empty(const nlohmann::json& root, const char* name) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!root.contains(name)) return empty;
    const auto& b = root.at(name);
    if (!b.is_object()) config_type_error(name, "an object");
    return b;
}

} // namespace detail

// Builds a ConfigFile from parsed JSON, filling defaults and validating
// every block. Does not touch the filesystem; spectrum_file existence is
// checked by load_config, which knows the base directory.
inline ConfigFile parse_config(const nlohmann::json& root) {
    if (!root.is_object()) {
        throw std::invalid_argument("config root must be a JSON object");
    }
    detail::reject_unknown_keys(root, "",
                                {"physical", "grid", "initial", "run", "envelope", "verify"});
    ConfigFile cfg;

    {
        const auto& b = detail::block_or_empty(root, "physical");
        detail::reject_unknown_keys(b, "physical.",
                                    {"lambda1", "lambda2", "nu", "c_v", "c_gamma"});
        detail::read_number(b, "physical.", "lambda1", cfg.physical.lambda1);
        detail::read_number(b, "physical.", "lambda2", cfg.physical.lambda2);
        detail::read_number(b, "physical.", "nu", cfg.physical.nu);
        detail::read_number(b, "physical.", "c_v", cfg.physical.c_v);
        detail::read_number(b, "physical.", "c_gamma", cfg.physical.c_gamma);
    }
    {
        const auto& b = detail::block_or_empty(root, "grid");
        detail::reject_unknown_keys(b, "grid.", {"r_min", "r_max", "n", "spacing"});
        detail::read_number(b, "grid.", "r_min", cfg.grid.r_min);
        detail::read_number(b, "grid.", "r_max", cfg.grid.r_max);
        detail::read_index(b, "grid.", "n", cfg.grid.n);
        std::string spacing = "uniform";
        detail::read_string(b, "grid.", "spacing", spacing);
        if (spacing == "uniform") {
            cfg.grid.spacing = GridSpacing::uniform;
        } else if (spacing == "logarithmic") {
            cfg.grid.spacing = GridSpacing::logarithmic;
        } else {
            throw std::invalid_argument("grid.spacing must be uniform or logarithmic");
        }
    }
    {
        const auto& b = detail::block_or_empty(root, "initial");
        detail::reject_unknown_keys(b, "initial.",
                                    {"preset", "amplitude", "center", "width", "exponent",
                                     "r_inner", "r_outer", "spectrum_file"});
        std::string preset;
        detail::read_string(b, "initial.", "preset", preset);
        detail::read_string(b, "initial.", "spectrum_file", cfg.initial.spectrum_file);
        if (!preset.empty() && !cfg.initial.spectrum_file.empty()) {
            throw std::invalid_argument(
                "initial must give either a preset or a spectrum_file, not both");
        }
        if (!cfg.initial.spectrum_file.empty()) {
            cfg.initial.kind = InitialKind::spectrum_file;
        } else if (preset.empty() || preset == "gaussian_bump") {
            cfg.initial.kind = InitialKind::gaussian_bump;
        } else if (preset == "power_law") {
            cfg.initial.kind = InitialKind::power_law;
        } else {
            throw std::invalid_argument("unknown preset: " + preset);
        }
        detail::read_number(b, "initial.", "amplitude", cfg.initial.amplitude);
        detail::read_number(b, "initial.", "center", cfg.initial.center);
        detail::read_number(b, "initial.", "width", cfg.initial.width);
        detail::read_number(b, "initial.", "exponent", cfg.initial.exponent);
        detail::read_number(b, "initial.", "r_inner", cfg.initial.r_inner);
        detail::read_number(b, "initial.", "r_outer", cfg.initial.r_outer);
    }
    {
        const auto& b = detail::block_or_empty(root, "run");
        detail::reject_unknown_keys(b, "run.",
                                    {"T", "dt", "cfl_safety", "mode", "record_every", "N"});
        detail::read_number(b, "run.", "T", cfg.run.T);
        detail::read_number(b, "run.", "dt", cfg.run.dt);
        detail::read_number(b, "run.", "cfl_safety", cfg.run.cfl_safety);
        detail::read_index(b, "run.", "record_every", cfg.run.record_every);
        detail::read_number(b, "run.", "N", cfg.run.order);
        std::string mode = "near_resonance";
        detail::read_string(b, "run.", "mode", mode);
        if (mode == "near_resonance") {
            cfg.run.mode = RunMode::near_resonance;
        } else if (mode == "exact_resonance") {
            cfg.run.mode = RunMode::exact_resonance;
        } else {
            throw std::invalid_argument("run.mode must be near_resonance or exact_resonance");
        }
    }
    {
        const auto& b = detail::block_or_empty(root, "envelope");
        detail::reject_unknown_keys(b, "envelope.", {"R0", "R_lower", "R_upper"});
        detail::read_auto_radius(b, "envelope.", "R0", cfg.envelope.r0);
        detail::read_auto_radius(b, "envelope.", "R_lower", cfg.envelope.r_lower);
        detail::read_auto_radius(b, "envelope.", "R_upper", cfg.envelope.r_upper);
    }
    {
        const auto& b = detail::block_or_empty(root, "verify");
        detail::reject_unknown_keys(
            b, "verify.",
            {"suite", "count", "pair_count", "seed", "amplitude_min", "amplitude_max",
             "bump_fraction", "mass_floor", "norm_ceiling", "scales"});
        detail::read_string(b, "verify.", "suite", cfg.verify.suite);
        detail::read_index(b, "verify.", "count", cfg.verify.count);
        detail::read_index(b, "verify.", "pair_count", cfg.verify.pair_count);
        detail::read_seed(b, "verify.", "seed", cfg.verify.seed);
        detail::read_number(b, "verify.", "amplitude_min", cfg.verify.amplitude_min);
        detail::read_number(b, "verify.", "amplitude_max", cfg.verify.amplitude_max);
        detail::read_number(b, "verify.", "bump_fraction", cfg.verify.bump_fraction);
        detail::read_number(b, "verify.", "mass_floor", cfg.verify.mass_floor);
        detail::read_number(b, "verify.", "norm_ceiling", cfg.verify.norm_ceiling);
        if (b.contains("scales")) {
            const auto& s = b.at("scales");
            if (!s.is_array()) detail::config_type_error("verify.scales", "an array of numbers");
            cfg.verify.scales.clear();
            for (const auto& v : s) {
                if (!v.is_number()) {
                    detail::config_type_error("verify.scales", "an array of numbers");
                }
                cfg.verify.scales.push_back(v.get<double>());
            }
        }
    }

    cfg.run.params = cfg.physical;
    // A power law without an explicit outer cut extends to the grid edge;
    // materialize that so the serialized config is self-contained.
    if (cfg.initial.kind == InitialKind::power_law && cfg.initial.r_outer == 0.0) {
        cfg.initial.r_outer = cfg.grid.r_max;
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json to_json(const ConfigFile& cfg) {
    nlohmann::json j;
    j["physical"] = {{"lambda1", cfg.physical.lambda1},
                     {"lambda2", cfg.physical.lambda2},
                     {"nu", cfg.physical.nu},
                     {"c_v", cfg.physical.c_v},
                     {"c_gamma", cfg.physical.c_gamma}};
    j["grid"] = {{"r_min", cfg.grid.r_min},
                 {"r_max", cfg.grid.r_max},
                 {"n", cfg.grid.n},
                 {"spacing",
                  cfg.grid.spacing == GridSpacing::uniform ? "uniform" : "logarithmic"}};
    switch (cfg.initial.kind) {
        case InitialKind::gaussian_bump:
            j["initial"] = {{"preset", "gaussian_bump"},
                            {"amplitude", cfg.initial.amplitude},
                            {"center", cfg.initial.center},
                            {"width", cfg.initial.width}};
            break;
        case InitialKind::power_law:
            j["initial"] = {{"preset", "power_law"},
                            {"amplitude", cfg.initial.amplitude},
                            {"exponent", cfg.initial.exponent},
                            {"r_inner", cfg.initial.r_inner},
                            {"r_outer", cfg.initial.r_outer}};
            break;
        case InitialKind::spectrum_file:
            j["initial"] = {{"spectrum_file", cfg.initial.spectrum_file}};
            break;
    }
    j["run"] = {{"T", cfg.run.T},
                {"dt", cfg.run.dt},
                {"cfl_safety", cfg.run.cfl_safety},
                {"mode",
                 cfg.run.mode == RunMode::near_resonance ? "near_resonance" : "exact_resonance"},
                {"record_every", cfg.run.record_every},
                {"N", cfg.run.order}};
    auto radius = [](double v) -> nlohmann::json {
        if (v == 0.0) return "auto";
        return v;
    };
    j["envelope"] = {{"R0", radius(cfg.envelope.r0)},
                     {"R_lower", radius(cfg.envelope.r_lower)},
                     {"R_upper", radius(cfg.envelope.r_upper)}};
    j["verify"] = {{"suite", cfg.verify.suite},
                   {"count", cfg.verify.count},
                   {"pair_count", cfg.verify.pair_count},
                   {"seed", cfg.verify.seed},
                   {"amplitude_min", cfg.verify.amplitude_min},
                   {"amplitude_max", cfg.verify.amplitude_max},
                   {"bump_fraction", cfg.verify.bump_fraction},
                   {"mass_floor", cfg.verify.mass_floor},
                   {"norm_ceiling", cfg.verify.norm_ceiling},
                   {"scales", cfg.verify.scales}};
    return j;
}

// Canonical text form: alphabetic keys (nlohmann objects sort), two-space
// indent, shortest round-trip doubles. config_hash is FNV-1a 64 over it.
inline std::string serialize_config(const ConfigFile& cfg) { return to_json(cfg).dump(2); }

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t config_hash(const ConfigFile& cfg) {
    return fnv1a64(serialize_config(cfg));
}

inline ConfigFile parse_config_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse_config(root);
}

inline ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ConfigFile cfg = parse_config_text(buf.str());
    cfg.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    if (cfg.initial.kind == InitialKind::spectrum_file) {
        const std::filesystem::path resolved = cfg.base_dir / cfg.initial.spectrum_file;
        if (!std::filesystem::exists(resolved)) {
            throw std::invalid_argument("initial.spectrum_file not found: " + resolved.string());
        }
    }
    return cfg;
}

inline Spectrum initial_spectrum(const ConfigFile& cfg, const GridPtr& grid) {
    if (cfg.initial.kind == InitialKind::spectrum_file) {
        return read_spectrum(cfg.base_dir / cfg.initial.spectrum_file, grid);
    }
    return preset_spectrum(
        cfg.initial.kind == InitialKind::power_law ? "power_law" : "gaussian_bump", cfg.initial,
        grid);
}

inline InvariantEnvelope config_envelope(const ConfigFile& cfg, const Spectrum& f0) {
    return make_envelope(f0, cfg.run.order, cfg.run.T, cfg.physical, cfg.envelope.r0,
                         cfg.envelope.r_lower, cfg.envelope.r_upper);
}

} // namespace wavekin
