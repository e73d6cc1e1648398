#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "config.hpp"
#include "rng.hpp"
#include "sums.hpp"

namespace expsum {

inline constexpr const char* kLibraryVersion = "1.0.0";

// One grid cell: a (p, set draw, T, k) combination. Failed cells carry
// the error text instead of a report; they never abort the sweep.
struct CellResult {
    u64 p = 0;
    u64 T = 0;  // resolved value; 0 when resolution itself failed
    int k = 0;
    u64 seed = 0;  // cell seed the set draws derive from
    bool ok = false;
    std::string error;
    BoundReport report;
    double wall_seconds = 0.0;
};

struct ExperimentRecord {
    ExperimentConfig config;  // snapshot; re-running it reproduces the cells
    std::string version;
    std::string convention;
    std::vector<CellResult> cells;
    double wall_seconds = 0.0;
};

enum class ReportFormat { csv, json };

inline std::optional<ReportFormat> report_format_from_string(
    const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    return std::nullopt;
}

namespace detail {

inline std::map<u64, std::complex<double>> load_gamma_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open gamma file: " + path);
    std::map<u64, std::complex<double>> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        u64 y = 0;
        double re = 0, im = 0;
        if (!(row >> y >> re >> im))
            throw std::runtime_error("bad gamma file line: " + line);
        out[y] = {re, im};
    }
    return out;
}

inline WeightedSubset resolve_set(const SetSpec& s, u64 modulus) {
    switch (s.kind) {
        case SetSpec::Kind::list:
            return subset_ones(modulus, s.elements);
        case SetSpec::Kind::interval: {
            if (s.hi > modulus)
                throw std::invalid_argument(
                    "interval end exceeds the set modulus");
            std::vector<u64> elems;
            for (u64 v = s.lo; v < s.hi; ++v) elems.push_back(v);
            return subset_ones(modulus, elems);
        }
        case SetSpec::Kind::random_draw:
            return subset_random(modulus, s.size, s.seed);
    }
    throw std::logic_error("unreachable set kind");
}

inline WeightedSubset apply_gamma(
    WeightedSubset ws, const GammaSpec& g, u64 cell_seed,
    const std::map<u64, std::complex<double>>& from_file) {
    switch (g.kind) {
        case GammaSpec::Kind::ones:
            return ws;
        case GammaSpec::Kind::random_phase:
            return with_unimodular_gamma(std::move(ws),
                                         mix_seed(cell_seed, g.seed));
        case GammaSpec::Kind::file: {
            std::vector<std::complex<double>> gam;
            for (u64 y : ws.elements) {
                const auto it = from_file.find(y);
                if (it == from_file.end())
                    throw std::invalid_argument(
                        "gamma file has no entry for element " +
                        std::to_string(y));
                gam.push_back(it->second);
            }
            return make_weighted_subset(ws.modulus, ws.elements, gam);
        }
    }
    throw std::logic_error("unreachable gamma kind");
}

inline u64 density_size(u64 p, u64 T, const DensityChoice& d) {
    if (d.full) return T;
    const long double raw =
        std::pow(static_cast<long double>(p), static_cast<long double>(d.exponent));
    u64 size = static_cast<u64>(std::llroundl(raw));
    if (size < 1) size = 1;
    if (size > T) size = T;
    return size;
}

}  // namespace detail

inline ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                       unsigned threads_override = 0) {
    using clock = std::chrono::steady_clock;
    const unsigned threads = threads_override ? threads_override : cfg.threads;

    ExperimentRecord rec;
    rec.config = cfg;
    rec.version = kLibraryVersion;
    rec.convention = kConventionStamp;
    const auto start = clock::now();

    const std::vector<u64> ps =
        (cfg.sweep && !cfg.sweep->p.empty()) ? cfg.sweep->p
                                             : std::vector<u64>{cfg.p};
    const std::vector<TChoice> ts = (cfg.sweep && !cfg.sweep->T.empty())
                                        ? cfg.sweep->T
                                        : std::vector<TChoice>{cfg.T};
    std::vector<std::optional<DensityChoice>> dens;
    if (cfg.sweep && !cfg.sweep->densities.empty())
        for (const auto& d : cfg.sweep->densities) dens.emplace_back(d);
    else
        dens.emplace_back(std::nullopt);

    std::map<u64, std::complex<double>> gamma_file;
    if (cfg.gamma.kind == GammaSpec::Kind::file)
        gamma_file = detail::load_gamma_file(cfg.gamma.path);

    for (u64 p : ps) {
        std::optional<PrimeContext> ctx;
        std::string p_error;
        try {
            ctx = make_prime_context(p);
        } catch (const std::exception& e) {
            p_error = e.what();
        }
        for (std::size_t di = 0; di < dens.size(); ++di) {
            for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                const u64 cell_seed = mix_seed(
                    mix_seed(mix_seed(cfg.seed, p), u64(di)), u64(ti));

                u64 T = 0;
                std::optional<OrderedElement> elem;
                std::optional<WeightedSubset> X, Y;
                std::string group_error = p_error;
                if (group_error.empty()) {
                    try {
                        T = ts[ti].max ? p - 1 : ts[ti].value;
                        if (T == 0 || (p - 1) % T != 0)
                            throw std::invalid_argument(
                                "T does not divide p-1: " + std::to_string(T));
                        elem = element_of_order(*ctx, T);
                        if (dens[di]) {
                            const u64 size = detail::density_size(p, T, *dens[di]);
                            X = subset_random(T, size, mix_seed(cell_seed, 1));
                            Y = subset_random(T, size, mix_seed(cell_seed, 2));
                        } else {
                            X = cfg.x ? detail::resolve_set(*cfg.x, T)
                                      : subset_full(T);
                            Y = cfg.y ? detail::resolve_set(*cfg.y, T)
                                      : subset_full(T);
                        }
                        Y = detail::apply_gamma(std::move(*Y), cfg.gamma,
                                                cell_seed, gamma_file);
                    } catch (const std::exception& e) {
                        group_error = e.what();
                    }
                }

                double exact = 0.0;
                bool have_exact = false;
                for (int k : cfg.k) {
                    const auto cell_start = clock::now();
                    CellResult cell;
                    cell.p = p;
                    cell.T = T;
                    cell.k = k;
                    cell.seed = cell_seed;
                    if (!group_error.empty()) {
                        cell.error = group_error;
                    } else {
                        try {
                            const auto spec =
                                make_sum_spec(*ctx, *elem, cfg.a, *X, *Y, k);
                            if (!have_exact) {
                                exact = w_sum(spec, threads);
                                have_exact = true;
                            }
                            cell.report = compare_all_with_exact(spec, exact);
                            cell.ok = true;
                        } catch (const std::exception& e) {
                            cell.error = e.what();
                        }
                    }
                    cell.wall_seconds =
                        std::chrono::duration<double>(clock::now() - cell_start)
                            .count();
                    rec.cells.push_back(std::move(cell));
                }
            }
        }
    }
    rec.wall_seconds =
        std::chrono::duration<double>(clock::now() - start).count();
    return rec;
}

namespace detail {

inline std::string fmt_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

// CSV holds one row per successful cell; failed cells appear only in the
// JSON form, which carries their error text. Columns are fixed; floats
// print with 12 significant digits; flags print as 0/1.
inline std::string render_csv(const ExperimentRecord& rec) {
    std::string out =
        "p,T,k,size_x,size_y,exact,trivial,theorem1,cor1,cor2,oldcor_gar1,"
        "fs_xy,gar_78,gaka_34,ratio_theorem1,below_threshold,admissible_ell,"
        "seed\n";
    for (const CellResult& cell : rec.cells) {
        if (!cell.ok) continue;
        const BoundReport& r = cell.report;
        if (r.exact >
            double(r.size_x) * double(r.size_y) * (1.0 + 1e-9))
            throw std::logic_error(
                "refusing to emit a row whose exact value exceeds the "
                "trivial bound");
        const auto val = [&](BoundId id) {
            return detail::fmt_g12(double(r.values.at(id)));
        };
        out += std::to_string(r.p) + ',' + std::to_string(r.T) + ',' +
               std::to_string(r.k) + ',' + std::to_string(r.size_x) + ',' +
               std::to_string(r.size_y) + ',' + detail::fmt_g12(r.exact) +
               ',' + val(BoundId::trivial) + ',' + val(BoundId::theorem1) +
               ',' + val(BoundId::cor1) + ',' + val(BoundId::cor2) + ',' +
               val(BoundId::oldcor_gar1) + ',' + val(BoundId::fs_xy) + ',' +
               val(BoundId::gar_78) + ',' + val(BoundId::gaka_34) + ',' +
               detail::fmt_g12(double(r.ratios.at(BoundId::theorem1))) + ',' +
               (r.below_threshold ? "1" : "0") + ',' +
               (r.admissible_ell ? "1" : "0") + ',' +
               std::to_string(cell.seed) + '\n';
    }
    return out;
}

namespace detail {

inline nlohmann::json bound_report_to_json(const BoundReport& r) {
    nlohmann::json j;
    j["p"] = r.p;
    j["T"] = r.T;
    j["k"] = r.k;
    j["size_x"] = r.size_x;
    j["size_y"] = r.size_y;
    j["exact"] = r.exact;
    auto values = nlohmann::json::object();
    auto ratios = nlohmann::json::object();
    for (const auto& [id, v] : r.values) values[to_string(id)] = double(v);
    for (const auto& [id, v] : r.ratios) ratios[to_string(id)] = double(v);
    j["values"] = values;
    j["ratios"] = ratios;
    j["below_threshold"] = r.below_threshold;
    j["t_threshold"] = r.t_threshold;
    j["admissible_ell"] = r.admissible_ell;
    return j;
}

inline BoundId bound_id_from_string(const std::string& name) {
    static constexpr BoundId kAll[] = {
        BoundId::trivial, BoundId::theorem1,    BoundId::cor1,
        BoundId::cor2,    BoundId::oldcor_gar1, BoundId::fs_xy,
        BoundId::fs_T,    BoundId::gar_78,      BoundId::gaka_34,
        BoundId::weil_sparse,
    };
    for (BoundId id : kAll)
        if (name == to_string(id)) return id;
    throw std::invalid_argument("unknown bound name: " + name);
}

inline BoundReport bound_report_from_json(const nlohmann::json& j) {
    BoundReport r;
    r.p = j.at("p").get<u64>();
    r.T = j.at("T").get<u64>();
    r.k = j.at("k").get<int>();
    r.size_x = j.at("size_x").get<u64>();
    r.size_y = j.at("size_y").get<u64>();
    r.exact = j.at("exact").get<double>();
    for (const auto& item : j.at("values").items())
        r.values[bound_id_from_string(item.key())] = item.value().get<double>();
    for (const auto& item : j.at("ratios").items())
        r.ratios[bound_id_from_string(item.key())] = item.value().get<double>();
    r.below_threshold = j.at("below_threshold").get<bool>();
    r.t_threshold = j.at("t_threshold").get<bool>();
    r.admissible_ell = j.at("admissible_ell").get<bool>();
    return r;
}

}  // namespace detail

inline nlohmann::json record_to_json(const ExperimentRecord& rec) {
    nlohmann::json j;
    j["config"] = config_to_json(rec.config);
    j["version"] = rec.version;
    j["convention"] = rec.convention;
    j["wall_seconds"] = rec.wall_seconds;
    auto cells = nlohmann::json::array();
    for (const CellResult& cell : rec.cells) {
        nlohmann::json c;
        c["p"] = cell.p;
        c["T"] = cell.T;
        c["k"] = cell.k;
        c["seed"] = cell.seed;
        c["ok"] = cell.ok;
        c["error"] = cell.error;
        c["wall_seconds"] = cell.wall_seconds;
        c["report"] = cell.ok ? detail::bound_report_to_json(cell.report)
                              : nlohmann::json();
        cells.push_back(std::move(c));
    }
    j["cells"] = cells;
    return j;
}

inline ExperimentRecord record_from_json(const nlohmann::json& j) {
    ExperimentRecord rec;
    rec.config = config_from_json(j.at("config"));
    rec.version = j.at("version").get<std::string>();
    rec.convention = j.at("convention").get<std::string>();
    rec.wall_seconds = j.at("wall_seconds").get<double>();
    for (const auto& c : j.at("cells")) {
        CellResult cell;
        cell.p = c.at("p").get<u64>();
        cell.T = c.at("T").get<u64>();
        cell.k = c.at("k").get<int>();
        cell.seed = c.at("seed").get<u64>();
        cell.ok = c.at("ok").get<bool>();
        cell.error = c.at("error").get<std::string>();
        cell.wall_seconds = c.at("wall_seconds").get<double>();
        if (cell.ok)
            cell.report = detail::bound_report_from_json(c.at("report"));
        rec.cells.push_back(std::move(cell));
    }
    return rec;
}

// Record equality is defined through the serialized form: two records are
// equal when they emit the same JSON document.
inline bool records_equal(const ExperimentRecord& a,
                          const ExperimentRecord& b) {
    return record_to_json(a) == record_to_json(b);
}

inline void emit_report(const ExperimentRecord& rec, ReportFormat fmt,
                        std::ostream& out) {
    if (fmt == ReportFormat::csv)
        out << render_csv(rec);
    else
        out << record_to_json(rec).dump(2) << '\n';
    if (!out) throw std::runtime_error("report write failed");
}

inline void emit_report(const ExperimentRecord& rec, ReportFormat fmt,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    emit_report(rec, fmt, out);
    out.flush();
    if (!out)
        throw std::runtime_error("cannot write output file: " + path);
}

}  // namespace expsum
