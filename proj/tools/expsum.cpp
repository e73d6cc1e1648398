#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include <CLI11.hpp>

#include <expsum/verify.hpp>

namespace {

using namespace expsum;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

// Cells that fail stay in the record; the console gets a warning so a
// partial sweep is never mistaken for a complete one.
unsigned warn_failed_cells(const ExperimentRecord& rec) {
    unsigned failed = 0;
    for (const auto& cell : rec.cells) {
        if (cell.ok) continue;
        ++failed;
        std::cerr << "cell p=" << cell.p << " T=" << cell.T
                  << " k=" << cell.k << " failed: " << cell.error << '\n';
    }
    return failed;
}

int cmd_exact(const std::string& config_path, unsigned threads) {
    const auto cfg = load_config(config_path);
    const auto rec = run_experiment(cfg, threads);
    std::set<std::tuple<u64, u64, u64>> groups;  // exact is k-independent
    for (const auto& cell : rec.cells) {
        if (!cell.ok) continue;
        if (!groups.insert({cell.p, cell.T, cell.seed}).second) continue;
        const auto& r = cell.report;
        std::printf("p=%llu T=%llu |X|=%llu |Y|=%llu exact=%.12g\n",
                    (unsigned long long)r.p, (unsigned long long)r.T,
                    (unsigned long long)r.size_x, (unsigned long long)r.size_y,
                    r.exact);
    }
    warn_failed_cells(rec);
    return 0;
}

void emit_or_print(const ExperimentRecord& rec, const std::string& out_path,
                   const std::string& format) {
    const auto fmt = report_format_from_string(format);
    if (!fmt)
        throw std::invalid_argument("format must be csv or json, got: " +
                                    format);
    if (out_path.empty())
        emit_report(rec, *fmt, std::cout);
    else
        emit_report(rec, *fmt, out_path);
}

int cmd_bounds(const std::string& config_path, unsigned threads,
               const std::string& out_path, const std::string& format) {
    const auto cfg = load_config(config_path);
    const auto rec = run_experiment(cfg, threads);
    if (!out_path.empty()) {
        emit_or_print(rec, out_path, format);
        warn_failed_cells(rec);
        return 0;
    }
    for (const auto& cell : rec.cells) {
        if (!cell.ok) continue;
        const auto& r = cell.report;
        std::printf("p=%llu T=%llu k=%d |X|=%llu |Y|=%llu exact=%.12g\n",
                    (unsigned long long)r.p, (unsigned long long)r.T, r.k,
                    (unsigned long long)r.size_x, (unsigned long long)r.size_y,
                    r.exact);
        for (const auto& [id, value] : r.values)
            std::printf("  %-12s %16.8g  ratio %10.4g\n", to_string(id),
                        double(value), double(r.ratios.at(id)));
        std::printf("  below_threshold=%d t_threshold=%d admissible_ell=%d\n",
                    r.below_threshold ? 1 : 0, r.t_threshold ? 1 : 0,
                    r.admissible_ell ? 1 : 0);
    }
    warn_failed_cells(rec);
    return 0;
}

int cmd_sweep(const std::string& config_path, unsigned threads,
              const std::string& out_path, const std::string& format) {
    const auto cfg = load_config(config_path);
    const auto rec = run_experiment(cfg, threads);
    const std::string target = out_path.empty() ? cfg.out : out_path;
    emit_or_print(rec, target, format);
    warn_failed_cells(rec);
    return 0;
}

int cmd_verify(const std::string& scale_name, unsigned threads) {
    const auto scale = verify_scale_from_string(scale_name);
    if (!scale)
        throw std::invalid_argument("scale must be smoke or full, got: " +
                                    scale_name);
    const auto summary =
        run_verification_suite(*scale, threads == 0 ? 1 : threads);
    std::cout << to_text(summary);
    return summary.all_pass ? 0 : 2;
}

int cmd_decompose(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    if (cfg.sweep && !cfg.sweep->p.empty())
        throw std::invalid_argument("decompose needs a single-prime config");
    const auto ctx = make_prime_context(cfg.p);
    const u64 T = cfg.T.max ? cfg.p - 1 : cfg.T.value;
    const auto elem = element_of_order(ctx, T);
    auto Y = cfg.y ? detail::resolve_set(*cfg.y, T) : subset_full(T);
    std::printf("p=%llu g=%llu T=%llu t=%llu lambda=%llu |Y|=%llu\n",
                (unsigned long long)ctx.p, (unsigned long long)ctx.g,
                (unsigned long long)elem.T, (unsigned long long)elem.t,
                (unsigned long long)elem.lambda,
                (unsigned long long)Y.size());
    if (Y.modulus != ctx.p_minus_1()) {
        const auto lifted = lift_set(Y.elements, T, ctx);
        std::printf("lifted to Z_%llu: %llu elements (%llu copies)\n",
                    (unsigned long long)ctx.p_minus_1(),
                    (unsigned long long)lifted.lifted.size(),
                    (unsigned long long)lifted.copies);
        Y = subset_ones(ctx.p_minus_1(), lifted.lifted);
    }
    const int k = cfg.k.front();
    for (const auto& [d, layer] : gcd_decompose(Y, ctx)) {
        std::printf("layer d=%llu modulus=%llu size=%llu elements:",
                    (unsigned long long)d, (unsigned long long)layer.modulus,
                    (unsigned long long)layer.size());
        for (std::size_t i = 0; i < layer.elements.size() && i < 8; ++i)
            std::printf(" %llu", (unsigned long long)layer.elements[i]);
        if (layer.size() > 8) std::printf(" ...");
        std::printf("\n");
        const auto choice = ell_choice(d, layer.size(), elem.t, k, ctx);
        std::printf(
            "  ell=%llu admissible=%d (lower_ok=%d upper_ok=%d d_ok=%d)\n",
            (unsigned long long)choice.ell, choice.admissible ? 1 : 0,
            choice.lower_ok ? 1 : 0, choice.upper_ok ? 1 : 0,
            choice.d_ok ? 1 : 0);
        const u64 show = std::min<u64>(std::max<u64>(choice.ell, 1), 10);
        const auto basket = build_prime_basket(layer.modulus, show);
        std::printf("  basket (first %llu):", (unsigned long long)show);
        for (u64 q : basket.primes) std::printf(" %llu", (unsigned long long)q);
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "exact double exponential sums over Z_p and their bound catalog"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::string format = "csv";
    std::string scale = "smoke";
    unsigned threads = 0;  // 0: use the config's thread count

    auto* exact_cmd =
        app.add_subcommand("exact", "evaluate the double sum exactly");
    exact_cmd->add_option("--config", config_path, "JSON config path")
        ->required();
    exact_cmd->add_option("--threads", threads, "worker threads");

    auto* bounds_cmd = app.add_subcommand(
        "bounds", "compare the exact value against every bound");
    bounds_cmd->add_option("--config", config_path, "JSON config path")
        ->required();
    bounds_cmd->add_option("--threads", threads, "worker threads");
    bounds_cmd->add_option("--out", out_path, "write report here");
    bounds_cmd->add_option("--format", format, "csv or json");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "run the parameter grid and emit a report");
    sweep_cmd->add_option("--config", config_path, "JSON config path")
        ->required();
    sweep_cmd->add_option("--threads", threads, "worker threads");
    sweep_cmd->add_option("--out", out_path, "write report here");
    sweep_cmd->add_option("--format", format, "csv or json");

    auto* verify_cmd =
        app.add_subcommand("verify", "re-verify library invariants");
    verify_cmd->add_option("--scale", scale, "smoke or full");
    verify_cmd->add_option("--threads", threads, "worker threads");

    auto* decompose_cmd = app.add_subcommand(
        "decompose", "print gcd layers and prime baskets for Y");
    decompose_cmd->add_option("--config", config_path, "JSON config path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*exact_cmd) return cmd_exact(config_path, threads);
        if (*bounds_cmd) return cmd_bounds(config_path, threads, out_path, format);
        if (*sweep_cmd) return cmd_sweep(config_path, threads, out_path, format);
        if (*verify_cmd) return cmd_verify(scale, threads);
        if (*decompose_cmd) return cmd_decompose(config_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "verification failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
