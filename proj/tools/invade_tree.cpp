// invade-tree: sampling, exact evaluation and statistical cross-checks for
// invasion clusters on regular trees. Subcommands mirror the library
// modules; `suite` runs the acceptance criteria from a config file.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "invtree/analytic.hpp"
#include "invtree/cluster.hpp"
#include "invtree/envelope.hpp"
#include "invtree/io.hpp"
#include "invtree/parallel.hpp"
#include "invtree/rng.hpp"
#include "invtree/rpoint.hpp"
#include "invtree/suite.hpp"
#include "invtree/transform.hpp"
#include "invtree/walk.hpp"
#include "invtree/weight_chain.hpp"

using namespace invtree;

namespace {

struct GlobalOpts {
    std::string seed_text;
    std::uint64_t seed = 0x6a09e667f3bcc908ULL;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::string out_file;  // empty = stdout
};

std::ostream& open_output(const GlobalOpts& g, std::ofstream& file) {
    if (g.out_file.empty()) return std::cout;
    file.open(g.out_file);
    if (!file) throw std::runtime_error("cannot open output file " + g.out_file);
    return file;
}

int cmd_analytic(const GlobalOpts& g, int sigma, int grid) {
    const TreeParams params(sigma);
    std::ofstream file;
    std::ostream& out = open_output(g, file);
    CsvWriter csv(out, g.seed, {"p", "theta", "zeta", "zeta_prime", "R", "p_hat"});
    for (int i = 0; i <= grid; ++i) {
        const double p = static_cast<double>(i) / grid;
        const bool super = p >= params.p_c && p < 1.0;
        csv.row({CsvWriter::cell(p), CsvWriter::cell(theta(params, p)),
                 CsvWriter::cell(zeta(params, p)),
                 CsvWriter::cell(super ? zeta_prime(params, p) : std::nan("")),
                 CsvWriter::cell(super ? jump_rate(params, p) : std::nan("")),
                 CsvWriter::cell(p >= params.p_c ? dual(params, p) : std::nan(""))});
    }
    return 0;
}

int cmd_chain(const GlobalOpts& g, int sigma, std::size_t length, std::size_t replicas,
              const std::string& emit) {
    const TreeParams params(sigma);
    std::vector<WeightChain> chains(replicas, WeightChain{params, {}, 0});
    parallel_for(replicas, g.threads, [&](std::size_t r) {
        chains[r] = sample_chain(params, length, derive_stream(g.seed, "cli.chain", r));
    });
    std::ofstream file;
    std::ostream& out = open_output(g, file);
    if (emit == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < replicas; ++r) {
            const DualChain dc = dualize(chains[r]);
            const RescaledChain rc = rescale(chains[r]);
            for (std::size_t k = 0; k < chains[r].w.size(); ++k) {
                rows.push_back({{"replica", r},
                                {"k", k},
                                {"W", chains[r].w[k]},
                                {"What", dc.w_hat[k]},
                                {"z", k >= 1 ? rc.z[k - 1] : std::nan("")}});
            }
        }
        out << nlohmann::json{{"version", kVersion}, {"seed", seed_hex(g.seed)}, {"rows", rows}}.dump(2)
            << "\n";
        return 0;
    }
    CsvWriter csv(out, g.seed, {"replica", "k", "W", "What", "z"});
    for (std::size_t r = 0; r < replicas; ++r) {
        const DualChain dc = dualize(chains[r]);
        const RescaledChain rc = rescale(chains[r]);
        for (std::size_t k = 0; k < chains[r].w.size(); ++k) {
            csv.row({CsvWriter::cell(static_cast<std::int64_t>(r)),
                     CsvWriter::cell(static_cast<std::int64_t>(k)), CsvWriter::cell(chains[r].w[k]),
                     CsvWriter::cell(dc.w_hat[k]),
                     CsvWriter::cell(k >= 1 ? rc.z[k - 1] : std::nan(""))});
        }
    }
    return 0;
}

std::string fmtcell(const char* label, double v) { return std::string(label) + CsvWriter::cell(v); }

int cmd_envelope(const GlobalOpts& g, double eps, double tau, std::size_t replicas) {
    std::vector<double> s_vals(replicas), sh_vals(replicas);
    const double eps_eff = eps > 0 ? eps : default_envelope_eps(tau);
    parallel_for(replicas, g.threads, [&](std::size_t r) {
        const EnvelopePath path = sample_envelope(eps_eff, 1.0, derive_stream(g.seed, "cli.env", r));
        s_vals[r] = s_functional(tau, path).value;
        sh_vals[r] = s_hat_functional(tau, path).value;
    });
    std::ofstream file;
    std::ostream& out = open_output(g, file);
    CsvWriter csv(out, g.seed, {"replica", "S", "S_hat", "exp_neg_S", "exp_neg_S_hat"});
    double es = 0.0, eh = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        csv.row({CsvWriter::cell(static_cast<std::int64_t>(r)), CsvWriter::cell(s_vals[r]),
                 CsvWriter::cell(sh_vals[r]), CsvWriter::cell(std::exp(-s_vals[r])),
                 CsvWriter::cell(std::exp(-sh_vals[r]))});
        es += std::exp(-s_vals[r]);
        eh += std::exp(-sh_vals[r]);
    }
    csv.comment(fmtcell("mean_exp_neg_S=", es / replicas) +
                fmtcell(" mean_exp_neg_S_hat=", eh / replicas));
    const double ch = std::cosh(std::sqrt(tau));
    csv.comment(fmtcell("flat_limit_gamma=", std::pow(1 + tau, -2.0)) +
                fmtcell(" flat_limit_gamma_hat=", 1.0 / (ch * ch)));
    csv.comment(fmtcell("truncation_bound_S=", 2 * tau * eps_eff) +
                fmtcell(" truncation_bound_S_hat=", 4 * tau * eps_eff));
    return 0;
}

void emit_tree_rows(CsvWriter& csv, std::size_t replica, const char* kind,
                    const std::vector<std::int64_t>& counts, bool with_kind) {
    std::int64_t cum = 0;
    for (std::size_t n = 0; n < counts.size(); ++n) {
        cum += counts[n];
        std::vector<std::string> cells{CsvWriter::cell(static_cast<std::int64_t>(replica))};
        if (with_kind) cells.push_back(kind);
        cells.push_back(CsvWriter::cell(static_cast<std::int64_t>(n)));
        cells.push_back(CsvWriter::cell(counts[n]));
        cells.push_back(CsvWriter::cell(cum));
        csv.row(cells);
    }
}

int cmd_sample(const GlobalOpts& g, const std::string& kind, int sigma, int height,
               std::int64_t steps, std::size_t replicas, const std::string& emit) {
    const TreeParams params(sigma);
    std::ofstream file;
    std::ostream& out = open_output(g, file);

    if (emit == "svg") {
        if (kind != "direct")
            throw std::runtime_error("sample: --emit svg requires --kind direct");
        const InvasionTrace trace =
            invade_direct(params, steps, derive_stream(g.seed, "cli.direct", 0), height, true);
        render_svg(trace, out);
        return 0;
    }

    std::vector<std::string> cols{"replica", "n", "C_n", "Ccum_n"};
    const bool coupled = kind == "coupled";
    if (coupled) cols = {"replica", "kind", "n", "C_n", "Ccum_n"};
    CsvWriter csv(out, g.seed, cols);
    for (std::size_t r = 0; r < replicas; ++r) {
        const std::uint64_t s = derive_stream(g.seed, "cli.sample", r);
        if (kind == "ipc") {
            emit_tree_rows(csv, r, "ipc", sample_ipc(params, height, s).counts, false);
        } else if (kind == "iic") {
            emit_tree_rows(csv, r, "iic", sample_iic(params, height, s).counts, false);
        } else if (coupled) {
            const auto [ipc, iic] = sample_coupled(params, height, s);
            emit_tree_rows(csv, r, "ipc", ipc.counts, true);
            emit_tree_rows(csv, r, "iic", iic.counts, true);
        } else if (kind == "direct") {
            const InvasionTrace t = invade_direct(params, steps, s, height);
            emit_tree_rows(csv, r, "direct", t.window_counts, false);
            csv.comment(fmtcell("replica=", static_cast<double>(r)) +
                        (t.stabilized ? " stabilized=1" : " stabilized=0"));
        } else {
            throw std::runtime_error("sample: unknown kind '" + kind + "'");
        }
    }
    return 0;
}

int cmd_transform(const GlobalOpts& g, const std::string& quantity, std::vector<double> taus,
                  long long n, std::size_t replicas) {
    const TreeParams params(2);
    std::ofstream file;
    std::ostream& out = open_output(g, file);
    CsvWriter csv(out, g.seed, {"tau", "estimate", "se", "closed_form_if_any"});
    const bool hat = quantity == "gamma-hat" || quantity == "iic-gamma-hat";
    const bool iic = quantity == "iic-gamma" || quantity == "iic-gamma-hat";
    if (!hat && !iic && quantity != "gamma") throw std::runtime_error("transform: unknown quantity");

    std::vector<WeightChain> chains;
    if (!iic && n > 0)
        chains = [&] {
            std::vector<WeightChain> cs(replicas, WeightChain{params, {}, 0});
            parallel_for(replicas, g.threads, [&](std::size_t r) {
                cs[r] = sample_chain(params, static_cast<std::size_t>(n),
                                     derive_stream(g.seed, "cli.tchain", r));
            });
            return cs;
        }();
    WeightChain critical{params, std::vector<double>(static_cast<std::size_t>(n) + 1, params.p_c), 0};

    for (double tau : taus) {
        double est = 0.0, se = 0.0, closed = std::nan("");
        if (iic) {
            est = hat ? conditional_volume_laplace(critical, n, tau)
                      : conditional_slice_laplace(critical, n, tau);
            const double ch = std::cosh(std::sqrt(tau));
            closed = hat ? 1.0 / (ch * ch) : std::pow(1.0 + tau, -2.0);
        } else if (n > 0) {
            std::vector<double> vals(chains.size());
            parallel_for(chains.size(), g.threads, [&](std::size_t c) {
                vals[c] = hat ? conditional_volume_laplace(chains[c], n, tau)
                              : conditional_slice_laplace(chains[c], n, tau);
            });
            const McEstimate m = mc_estimate(vals);
            est = m.mean;
            se = m.se;
        } else {
            const McEstimate m = hat ? limit_laplace_gamma_hat(tau, replicas, g.seed)
                                     : limit_laplace_gamma(tau, replicas, g.seed);
            est = m.mean;
            se = m.se;
        }
        csv.row({CsvWriter::cell(tau), CsvWriter::cell(est), CsvWriter::cell(se),
                 CsvWriter::cell(closed)});
    }
    return 0;
}

int cmd_rpoint(const GlobalOpts& g, const std::string& geometry_file, long long N,
               std::size_t chain_count, const std::string& mode, const std::string& segment,
               long long offset) {
    std::ifstream gf(geometry_file);
    if (!gf) throw std::runtime_error("rpoint: cannot open geometry file " + geometry_file);
    std::stringstream buf;
    buf << gf.rdbuf();
    SpanningGeometry geom = SpanningGeometry::parse(buf.str());
    geom.apportion(N);

    const TreeParams params(2);
    std::vector<WeightChain> chains(chain_count, WeightChain{params, {}, 0});
    parallel_for(chain_count, g.threads, [&](std::size_t r) {
        chains[r] = sample_chain(params, static_cast<std::size_t>(N),
                                 derive_stream(g.seed, "cli.rchain", r));
    });

    std::ofstream file;
    std::ostream& out = open_output(g, file);
    CsvWriter csv(out, g.seed, {"mode", "segment", "k", "estimate", "se", "scaled_limit"});
    if (mode == "summed") {
        const McEstimate est = finite_rpoint(geom, chains, RpointMode::summed);
        csv.row({"summed", "", CsvWriter::cell(static_cast<std::int64_t>(-1)),
                 CsvWriter::cell(est.mean), CsvWriter::cell(est.se),
                 CsvWriter::cell(limit_rpoint(geom).value)});
    } else if (mode == "joint") {
        const int v = geom.find(segment);
        if (v <= 0) throw std::runtime_error("rpoint: unknown segment '" + segment + "'");
        const McEstimate est = finite_rpoint(geom, chains, RpointMode::joint, v, offset);
        const double s = static_cast<double>(offset) / static_cast<double>(N);
        csv.row({"joint", segment, CsvWriter::cell(offset), CsvWriter::cell(est.mean),
                 CsvWriter::cell(est.se), CsvWriter::cell(limit_joint(geom, v, s).value)});
        const McEstimate dens = finite_exit_density(geom, chains, v, offset);
        csv.row({"density", segment, CsvWriter::cell(offset), CsvWriter::cell(dens.mean),
                 CsvWriter::cell(dens.se), CsvWriter::cell(backbone_density(geom, v, s).value)});
    } else {
        throw std::runtime_error("rpoint: unknown mode '" + mode + "'");
    }
    return 0;
}

int cmd_walk(const GlobalOpts& g, const std::string& kind, int sigma, std::int64_t kmax, int n,
             std::size_t environments, std::size_t walks_per_env) {
    const TreeParams params(sigma);
    std::ofstream file;
    std::ostream& out = open_output(g, file);
    CsvWriter csv(out, g.seed, {"env", "k_or_n", "statistic"});
    auto make_tree = [&](int height, std::uint64_t s) {
        return kind == "iic" ? sample_iic(params, height, s) : sample_ipc(params, height, s);
    };
    if (n > 0) {
        for (std::size_t e = 0; e < environments; ++e) {
            const ClusterTree tree = make_tree(n, derive_stream(g.seed, "cli.walk.env", e));
            const WalkEnvironment env(tree);
            double total = 0.0;
            for (std::size_t w = 0; w < walks_per_env; ++w)
                total += static_cast<double>(
                    exit_time(env, n, derive_stream(g.seed, "cli.walk.exit", e * 100000 + w)));
            csv.row({CsvWriter::cell(static_cast<std::int64_t>(e)),
                     CsvWriter::cell(static_cast<std::int64_t>(n)),
                     CsvWriter::cell(total / walks_per_env)});
        }
        return 0;
    }
    std::vector<std::int64_t> checkpoints;
    for (std::int64_t k = 16; k <= kmax; k *= 2) checkpoints.push_back(k);
    for (std::size_t e = 0; e < environments; ++e) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            const ClusterTree tree = make_tree(environment_height(kmax),
                                               derive_stream(g.seed, "cli.walk.env", e * 97 + attempt));
            const WalkEnvironment env(tree);
            try {
                const WalkSummary s =
                    walk(env, 0, kmax, derive_stream(g.seed, "cli.walk.range", e), checkpoints);
                for (std::size_t i = 0; i < checkpoints.size(); ++i)
                    csv.row({CsvWriter::cell(static_cast<std::int64_t>(e)),
                             CsvWriter::cell(checkpoints[i]), CsvWriter::cell(s.range_at[i])});
                break;
            } catch (const boundary_contact_error&) {
                continue;
            }
        }
    }
    return 0;
}

int cmd_suite(const GlobalOpts& g, const std::string& config_file, bool seed_given,
              bool threads_given, bool outdir_given) {
    std::ifstream cf(config_file);
    if (!cf) {
        std::cerr << "suite: cannot open config file " << config_file << "\n";
        return 1;
    }
    std::stringstream buf;
    buf << cf.rdbuf();
    SuiteOptions opt;
    try {
        opt = parse_suite_config(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "suite: " << e.what() << "\n";
        return 1;
    }
    if (seed_given) opt.seed = g.seed;
    if (threads_given) opt.threads = g.threads;
    if (outdir_given) opt.out_dir = g.out_dir;
    return run_suite(opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invasion clusters on regular trees: samplers, exact limits, cross-checks"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt = app.add_option("--seed", g.seed_text, "master seed (64-bit hex or decimal)");
    auto* threads_opt = app.add_option("--threads", g.threads, "worker threads");
    auto* outdir_opt = app.add_option("--out-dir", g.out_dir, "report directory (suite)");
    app.add_option("--out", g.out_file, "write output to this file instead of stdout");

    int sigma = 2, grid = 200, height = 100, wn = 0;
    std::size_t length = 100, replicas = 1, chain_count = 1000, environments = 10,
                walks_per_env = 4;
    std::int64_t steps = 10000, kmax = 4096, offset = 0, N = 200;
    double eps = 0.0, tau = 1.0;
    std::string emit = "csv", kind = "ipc", quantity = "gamma", geometry_file, mode = "summed",
                segment = "x", config_file;
    std::vector<double> taus{1.0};
    long long tn = 0;

    auto* analytic_cmd = app.add_subcommand("analytic", "percolation functions on a grid");
    analytic_cmd->add_option("--sigma", sigma);
    analytic_cmd->add_option("--grid", grid);

    auto* chain_cmd = app.add_subcommand("chain", "backbone forward-maximal-weight chains");
    chain_cmd->add_option("--sigma", sigma);
    chain_cmd->add_option("--length", length);
    chain_cmd->add_option("--replicas", replicas);
    chain_cmd->add_option("--emit", emit)->check(CLI::IsMember({"csv", "json"}));

    auto* env_cmd = app.add_subcommand("envelope", "record-path sampling and functionals");
    env_cmd->add_option("--eps", eps);
    env_cmd->add_option("--tau", tau);
    env_cmd->add_option("--replicas", replicas);

    auto* sample_cmd = app.add_subcommand("sample", "cluster sampling (structural or direct)");
    sample_cmd->add_option("--kind", kind)->check(CLI::IsMember({"ipc", "iic", "coupled", "direct"}));
    sample_cmd->add_option("--sigma", sigma);
    sample_cmd->add_option("--height", height);
    sample_cmd->add_option("--steps", steps);
    sample_cmd->add_option("--replicas", replicas);
    sample_cmd->add_option("--emit", emit)->check(CLI::IsMember({"csv", "json", "svg"}));

    auto* transform_cmd = app.add_subcommand("transform", "cluster-size Laplace transforms");
    transform_cmd->add_option("--quantity", quantity)
        ->check(CLI::IsMember({"gamma", "gamma-hat", "iic-gamma", "iic-gamma-hat"}));
    transform_cmd->add_option("--tau", taus);
    transform_cmd->add_option("--n", tn);
    transform_cmd->add_option("--replicas", replicas);

    auto* rpoint_cmd = app.add_subcommand("rpoint", "spanning-tree connection probabilities");
    rpoint_cmd->add_option("--geometry", geometry_file)->required();
    rpoint_cmd->add_option("--N", N);
    rpoint_cmd->add_option("--chains", chain_count);
    rpoint_cmd->add_option("--mode", mode)->check(CLI::IsMember({"summed", "joint"}));
    rpoint_cmd->add_option("--segment", segment);
    rpoint_cmd->add_option("--offset", offset);

    auto* walk_cmd = app.add_subcommand("walk", "random walk statistics on sampled clusters");
    walk_cmd->add_option("--kind", kind)->check(CLI::IsMember({"ipc", "iic"}));
    walk_cmd->add_option("--sigma", sigma);
    walk_cmd->add_option("--kmax", kmax);
    walk_cmd->add_option("--n", wn);
    walk_cmd->add_option("--environments", environments);
    walk_cmd->add_option("--walks-per-env", walks_per_env);

    auto* suite_cmd = app.add_subcommand("suite", "run acceptance experiments from a config");
    suite_cmd->add_option("--config", config_file)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.seed_text.empty()) g.seed = parse_seed(g.seed_text);
        if (g.threads == 0) g.threads = default_threads();
        if (analytic_cmd->parsed()) return cmd_analytic(g, sigma, grid);
        if (chain_cmd->parsed()) return cmd_chain(g, sigma, length, replicas, emit);
        if (env_cmd->parsed()) return cmd_envelope(g, eps, tau, replicas);
        if (sample_cmd->parsed()) return cmd_sample(g, kind, sigma, height, steps, replicas, emit);
        if (transform_cmd->parsed()) return cmd_transform(g, quantity, taus, tn, replicas);
        if (rpoint_cmd->parsed())
            return cmd_rpoint(g, geometry_file, N, chain_count, mode, segment, offset);
        if (walk_cmd->parsed())
            return cmd_walk(g, kind, sigma, kmax, wn, environments, walks_per_env);
        if (suite_cmd->parsed())
            return cmd_suite(g, config_file, static_cast<bool>(*seed_opt),
                             static_cast<bool>(*threads_opt), static_cast<bool>(*outdir_opt));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
