#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ring.hpp"

namespace expsum {

// Experiment configuration: a JSON document resolving to a grid of
// evaluation cells (p x density x T x k). Parsing is strict: unknown
// fields are errors, and single-prime configs are validated eagerly.

struct SetSpec {
    enum class Kind { list, interval, random_draw };
    Kind kind = Kind::list;
    std::vector<u64> elements;  // list
    u64 lo = 0, hi = 0;         // interval [lo, hi)
    u64 size = 0;               // random draw
    u64 seed = 0;
    friend bool operator==(const SetSpec&, const SetSpec&) = default;
};

struct GammaSpec {
    enum class Kind { ones, random_phase, file };
    Kind kind = Kind::ones;
    u64 seed = 0;       // random_phase
    std::string path;   // file: lines of "y re im"
    friend bool operator==(const GammaSpec&, const GammaSpec&) = default;
};

struct TChoice {
    bool max = true;  // T = p-1
    u64 value = 0;
    friend bool operator==(const TChoice&, const TChoice&) = default;
};

struct DensityChoice {
    bool full = false;        // |X| = |Y| = T
    double exponent = 0.0;    // otherwise |X| = |Y| = round(p^exponent)
    friend bool operator==(const DensityChoice&, const DensityChoice&) = default;
};

struct SweepAxes {
    std::vector<u64> p;
    std::vector<DensityChoice> densities;
    std::vector<TChoice> T;
    friend bool operator==(const SweepAxes&, const SweepAxes&) = default;
};

struct ExperimentConfig {
    u64 p = 0;  // single prime; 0 iff the sweep provides the p axis
    TChoice T;
    u64 a = 1;
    std::vector<int> k = {1, 2, 3};
    std::optional<SetSpec> x;  // absent: all of Z_T
    std::optional<SetSpec> y;
    GammaSpec gamma;
    std::optional<SweepAxes> sweep;
    std::string out;
    unsigned threads = 1;
    u64 seed = 0;
    friend bool operator==(const ExperimentConfig&,
                           const ExperimentConfig&) = default;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const char* where,
                           std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* name : allowed)
            if (item.key() == name) known = true;
        if (!known)
            throw std::invalid_argument(std::string("unknown field: ") +
                                        where + item.key());
    }
}

inline u64 get_u64(const json& j, const std::string& name) {
    if (!j.is_number_unsigned())
        throw std::invalid_argument("field " + name +
                                    " must be a nonnegative integer");
    return j.get<u64>();
}

inline TChoice parse_t_choice(const json& j, const std::string& name) {
    if (j.is_string() && j.get<std::string>() == "max") return {true, 0};
    if (j.is_number_unsigned()) {
        const u64 v = j.get<u64>();
        if (v == 0)
            throw std::invalid_argument("field " + name + " must be positive");
        return {false, v};
    }
    throw std::invalid_argument("field " + name +
                                " must be \"max\" or a positive integer");
}

inline json t_choice_to_json(const TChoice& t) {
    if (t.max) return json("max");
    return json(t.value);
}

inline DensityChoice parse_density(const json& j) {
    if (j.is_string() && j.get<std::string>() == "full") return {true, 0.0};
    if (j.is_number()) {
        const double e = j.get<double>();
        if (e <= 0.0)
            throw std::invalid_argument(
                "density exponents must be positive");
        return {false, e};
    }
    throw std::invalid_argument(
        "densities entries must be \"full\" or a positive number");
}

inline json density_to_json(const DensityChoice& d) {
    if (d.full) return json("full");
    return json(d.exponent);
}

inline SetSpec parse_set_spec(const json& j, const std::string& name) {
    if (!j.is_object())
        throw std::invalid_argument("field " + name + " must be an object");
    if (!j.contains("kind"))
        throw std::invalid_argument("field " + name + " needs a kind");
    const std::string kind = j.at("kind").get<std::string>();
    SetSpec s;
    const std::string prefix = name + ".";
    if (kind == "list") {
        reject_unknown(j, prefix.c_str(), {"kind", "elements"});
        s.kind = SetSpec::Kind::list;
        if (!j.contains("elements") || !j.at("elements").is_array())
            throw std::invalid_argument("field " + name +
                                        ".elements must be an array");
        for (const auto& e : j.at("elements"))
            s.elements.push_back(get_u64(e, name + ".elements"));
    } else if (kind == "interval") {
        reject_unknown(j, prefix.c_str(), {"kind", "lo", "hi"});
        s.kind = SetSpec::Kind::interval;
        s.lo = get_u64(j.at("lo"), name + ".lo");
        s.hi = get_u64(j.at("hi"), name + ".hi");
        if (s.lo >= s.hi)
            throw std::invalid_argument("field " + name +
                                        " needs lo < hi");
    } else if (kind == "random") {
        reject_unknown(j, prefix.c_str(), {"kind", "size", "seed"});
        s.kind = SetSpec::Kind::random_draw;
        s.size = get_u64(j.at("size"), name + ".size");
        if (j.contains("seed")) s.seed = get_u64(j.at("seed"), name + ".seed");
    } else {
        throw std::invalid_argument("field " + name +
                                    ".kind must be list, interval, or random");
    }
    return s;
}

inline json set_spec_to_json(const SetSpec& s) {
    json j;
    switch (s.kind) {
        case SetSpec::Kind::list:
            j["kind"] = "list";
            j["elements"] = s.elements;
            break;
        case SetSpec::Kind::interval:
            j["kind"] = "interval";
            j["lo"] = s.lo;
            j["hi"] = s.hi;
            break;
        case SetSpec::Kind::random_draw:
            j["kind"] = "random";
            j["size"] = s.size;
            j["seed"] = s.seed;
            break;
    }
    return j;
}

inline GammaSpec parse_gamma(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("field gamma must be an object");
    if (!j.contains("kind"))
        throw std::invalid_argument("field gamma needs a kind");
    const std::string kind = j.at("kind").get<std::string>();
    GammaSpec g;
    if (kind == "ones") {
        reject_unknown(j, "gamma.", {"kind"});
        g.kind = GammaSpec::Kind::ones;
    } else if (kind == "random") {
        reject_unknown(j, "gamma.", {"kind", "seed"});
        g.kind = GammaSpec::Kind::random_phase;
        if (j.contains("seed")) g.seed = get_u64(j.at("seed"), "gamma.seed");
    } else if (kind == "file") {
        reject_unknown(j, "gamma.", {"kind", "path"});
        g.kind = GammaSpec::Kind::file;
        if (!j.contains("path") || !j.at("path").is_string())
            throw std::invalid_argument("field gamma.path must be a string");
        g.path = j.at("path").get<std::string>();
        if (g.path.empty())
            throw std::invalid_argument("field gamma.path must be nonempty");
    } else {
        throw std::invalid_argument(
            "field gamma.kind must be ones, random, or file");
    }
    return g;
}

inline json gamma_to_json(const GammaSpec& g) {
    json j;
    switch (g.kind) {
        case GammaSpec::Kind::ones:
            j["kind"] = "ones";
            break;
        case GammaSpec::Kind::random_phase:
            j["kind"] = "random";
            j["seed"] = g.seed;
            break;
        case GammaSpec::Kind::file:
            j["kind"] = "file";
            j["path"] = g.path;
            break;
    }
    return j;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& root) {
    using detail::get_u64;
    if (!root.is_object())
        throw std::invalid_argument("config must be a JSON object");
    detail::reject_unknown(root, "",
                           {"p", "T", "a", "k", "x", "y", "gamma", "sweep",
                            "out", "threads", "seed"});

    ExperimentConfig cfg;
    if (root.contains("p")) cfg.p = get_u64(root.at("p"), "p");
    if (root.contains("T")) cfg.T = detail::parse_t_choice(root.at("T"), "T");
    if (root.contains("a")) cfg.a = get_u64(root.at("a"), "a");
    if (root.contains("k")) {
        if (!root.at("k").is_array() || root.at("k").empty())
            throw std::invalid_argument("field k must be a nonempty array");
        cfg.k.clear();
        for (const auto& e : root.at("k")) {
            const u64 v = get_u64(e, "k");
            if (v == 0) throw std::invalid_argument("field k entries must be >= 1");
            cfg.k.push_back(static_cast<int>(v));
        }
    }
    if (root.contains("x") && !root.at("x").is_null())
        cfg.x = detail::parse_set_spec(root.at("x"), "x");
    if (root.contains("y") && !root.at("y").is_null())
        cfg.y = detail::parse_set_spec(root.at("y"), "y");
    if (root.contains("gamma")) cfg.gamma = detail::parse_gamma(root.at("gamma"));
    if (root.contains("sweep") && !root.at("sweep").is_null()) {
        const auto& sw = root.at("sweep");
        if (!sw.is_object())
            throw std::invalid_argument("field sweep must be an object");
        detail::reject_unknown(sw, "sweep.", {"p", "densities", "T"});
        SweepAxes axes;
        if (sw.contains("p"))
            for (const auto& e : sw.at("p"))
                axes.p.push_back(get_u64(e, "sweep.p"));
        if (sw.contains("densities"))
            for (const auto& e : sw.at("densities"))
                axes.densities.push_back(detail::parse_density(e));
        if (sw.contains("T"))
            for (const auto& e : sw.at("T"))
                axes.T.push_back(detail::parse_t_choice(e, "sweep.T"));
        cfg.sweep = std::move(axes);
    }
    if (root.contains("out")) cfg.out = root.at("out").get<std::string>();
    if (root.contains("threads")) {
        cfg.threads = static_cast<unsigned>(get_u64(root.at("threads"), "threads"));
        if (cfg.threads == 0)
            throw std::invalid_argument("field threads must be >= 1");
    }
    if (root.contains("seed")) cfg.seed = get_u64(root.at("seed"), "seed");

    // p-dependent validation runs eagerly for single-prime configs; a
    // sweep's p axis is validated per cell so one bad prime cannot sink
    // the whole grid.
    const bool swept_p = cfg.sweep && !cfg.sweep->p.empty();
    if (swept_p && cfg.p != 0)
        throw std::invalid_argument("give either p or sweep.p, not both");
    if (!swept_p) {
        if (cfg.p == 0) throw std::invalid_argument("config needs p or sweep.p");
        if (!is_prime(cfg.p))
            throw std::invalid_argument("p is not prime: " +
                                        std::to_string(cfg.p));
        if (!cfg.T.max && (cfg.p - 1) % cfg.T.value != 0)
            throw std::invalid_argument(
                "T does not divide p-1: " + std::to_string(cfg.T.value));
        if (cfg.a % cfg.p == 0)
            throw std::invalid_argument("a is divisible by p");
        for (int k : cfg.k)
            if (static_cast<u64>(k) >= cfg.p)
                throw std::invalid_argument("k must be smaller than p");
    }
    if (cfg.a == 0) throw std::invalid_argument("a must be nonzero");
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                    e.what());
    }
    return config_from_json(root);
}

// Every field is written explicitly, so serialize(parse(serialize(c)))
// is byte-identical to serialize(c).
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["p"] = cfg.p;
    j["T"] = detail::t_choice_to_json(cfg.T);
    j["a"] = cfg.a;
    j["k"] = cfg.k;
    j["x"] = cfg.x ? detail::set_spec_to_json(*cfg.x) : nlohmann::json();
    j["y"] = cfg.y ? detail::set_spec_to_json(*cfg.y) : nlohmann::json();
    j["gamma"] = detail::gamma_to_json(cfg.gamma);
    if (cfg.sweep) {
        nlohmann::json sw;
        sw["p"] = cfg.sweep->p;
        sw["densities"] = nlohmann::json::array();
        for (const auto& d : cfg.sweep->densities)
            sw["densities"].push_back(detail::density_to_json(d));
        sw["T"] = nlohmann::json::array();
        for (const auto& t : cfg.sweep->T)
            sw["T"].push_back(detail::t_choice_to_json(t));
        j["sweep"] = sw;
    } else {
        j["sweep"] = nlohmann::json();
    }
    j["out"] = cfg.out;
    j["threads"] = cfg.threads;
    j["seed"] = cfg.seed;
    return j;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

}  // namespace expsum
