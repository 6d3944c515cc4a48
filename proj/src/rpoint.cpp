#include "invtree/rpoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace invtree {

SpanningGeometry SpanningGeometry::parse(const std::string& text) {
    SpanningGeometry g;
    g.nodes.push_back({"o", -1, 0.0, 0});
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    double total = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string id, parent;
        double len = 0.0;
        if (!(ls >> id)) continue;  // blank
        if (!(ls >> parent >> len) || len <= 0.0)
            throw std::invalid_argument("geometry line " + std::to_string(lineno) +
                                        ": expected 'id parent length' with positive length");
        if (id == "o" || g.find(id) >= 0)
            throw std::invalid_argument("geometry line " + std::to_string(lineno) +
                                        ": duplicate or reserved id '" + id + "'");
        const int p = g.find(parent);
        if (p < 0)
            throw std::invalid_argument("geometry line " + std::to_string(lineno) +
                                        ": unknown parent '" + parent + "'");
        g.nodes.push_back({id, p, len, 0});
        total += len;
    }
    if (g.nodes.size() < 2) throw std::invalid_argument("geometry: no segments");
    for (std::size_t i = 1; i < g.nodes.size(); ++i) g.nodes[i].t /= total;
    return g;
}

int SpanningGeometry::find(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

bool SpanningGeometry::branches_at_root() const {
    int degree = 0;
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].parent == 0) ++degree;
    return degree > 1;
}

long long SpanningGeometry::total_edges() const {
    long long n = 0;
    for (std::size_t i = 1; i < nodes.size(); ++i) n += nodes[i].n;
    return n;
}

void SpanningGeometry::apportion(long long N) {
    const long long segs = static_cast<long long>(segment_count());
    if (N < segs) throw std::invalid_argument("apportion: N smaller than the segment count");
    std::vector<double> frac(nodes.size(), 0.0);
    long long assigned = 0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double ideal = static_cast<double>(N) * nodes[i].t;
        nodes[i].n = std::max<long long>(1, static_cast<long long>(std::floor(ideal)));
        frac[i] = ideal - std::floor(ideal);
        assigned += nodes[i].n;
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < nodes.size(); ++i) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    std::size_t pos = 0;
    while (assigned < N) {
        ++nodes[order[pos % order.size()]].n;
        ++assigned;
        ++pos;
    }
    while (assigned > N) {  // possible only via the >=1 floor on tiny segments
        std::size_t big = 1;
        for (std::size_t i = 2; i < nodes.size(); ++i)
            if (nodes[i].n > nodes[big].n) big = i;
        if (nodes[big].n <= 1) throw std::invalid_argument("apportion: N too small");
        --nodes[big].n;
        --assigned;
    }
}

namespace {

// Per-segment cut data along the root-to-v path, scaled and integer forms.
struct PathData {
    std::vector<int> path;            // node indices o = path[0] < ... < path[j] = v
    std::vector<double> side_t;       // scaled side mass at each path node (index aligned)
    std::vector<long long> side_n;    // integer side mass
    std::vector<double> h_t;          // scaled height of each path node
    std::vector<long long> h_n;       // integer height
    std::vector<double> m_t;          // m_{path[i]}^v
};

double subtree_t(const SpanningGeometry& g, int v) {
    double total = g.nodes[static_cast<std::size_t>(v)].t;
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (g.nodes[i].parent == v) total += subtree_t(g, static_cast<int>(i));
    return total;
}

long long subtree_n(const SpanningGeometry& g, int v) {
    long long total = g.nodes[static_cast<std::size_t>(v)].n;
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (g.nodes[i].parent == v) total += subtree_n(g, static_cast<int>(i));
    return total;
}

PathData path_data(const SpanningGeometry& g, int v) {
    if (v <= 0 || v >= static_cast<int>(g.nodes.size()))
        throw std::invalid_argument("rpoint: bad segment index");
    PathData d;
    for (int u = v; u >= 0; u = g.nodes[static_cast<std::size_t>(u)].parent) d.path.push_back(u);
    std::reverse(d.path.begin(), d.path.end());
    const std::size_t j = d.path.size();
    d.side_t.assign(j, 0.0);
    d.side_n.assign(j, 0);
    d.h_t.assign(j, 0.0);
    d.h_n.assign(j, 0);
    d.m_t.assign(j, 0.0);
    for (std::size_t i = 0; i < j; ++i) {
        const int u = d.path[i];
        const int next = i + 1 < j ? d.path[i + 1] : -1;
        for (std::size_t c = 1; c < g.nodes.size(); ++c) {
            if (g.nodes[c].parent != u || static_cast<int>(c) == next) continue;
            d.side_t[i] += subtree_t(g, static_cast<int>(c));
            d.side_n[i] += subtree_n(g, static_cast<int>(c));
        }
        if (i > 0) {
            d.h_t[i] = d.h_t[i - 1] + g.nodes[static_cast<std::size_t>(u)].t;
            d.h_n[i] = d.h_n[i - 1] + g.nodes[static_cast<std::size_t>(u)].n;
        }
        d.m_t[i] = d.h_t[i];
        for (std::size_t l = 1; l <= i; ++l) d.m_t[i] += d.side_t[l];
        // root side mass excluded: the limit formulas assume no branching at o
    }
    return d;
}

double pi_of_path(const SpanningGeometry& g, const PathData& d) {
    double pi = 1.0;
    for (std::size_t i = 1; i + 1 < d.path.size(); ++i) {
        const double t_w = g.nodes[static_cast<std::size_t>(d.path[i])].t;
        pi *= (t_w + d.m_t[i - 1]) / d.m_t[i];
    }
    return pi;
}

int segment_child_count(const SpanningGeometry& g, int v) {
    int c = 0;
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (g.nodes[i].parent == v) ++c;
    return c;
}

}  // namespace

RpointValue limit_joint(const SpanningGeometry& geom, int v, double s) {
    if (geom.branches_at_root()) return {0.0, true};
    const PathData d = path_data(geom, v);
    const double t_v = geom.nodes[static_cast<std::size_t>(v)].t;
    if (!(s >= 0.0 && s <= t_v)) throw std::domain_error("limit_joint: s outside [0, t_v]");
    const std::size_t j = d.path.size();
    const double m_vminus = j >= 2 ? d.m_t[j - 2] : 0.0;
    return {(s + m_vminus) * pi_of_path(geom, d), false};
}

RpointValue limit_rpoint(const SpanningGeometry& geom) {
    if (geom.branches_at_root()) return {0.0, true};
    double sum = 0.0;
    for (std::size_t v = 1; v < geom.nodes.size(); ++v) {
        const PathData d = path_data(geom, static_cast<int>(v));
        const double t_v = geom.nodes[v].t;
        const std::size_t j = d.path.size();
        const double m_vminus = j >= 2 ? d.m_t[j - 2] : 0.0;
        sum += (0.5 * t_v * t_v + t_v * m_vminus) * pi_of_path(geom, d);
    }
    return {sum, false};
}

RpointValue backbone_density(const SpanningGeometry& geom, int v, double s) {
    const RpointValue joint = limit_joint(geom, v, s);
    if (joint.root_branching) return joint;
    return {joint.value / limit_rpoint(geom).value, false};
}

namespace {

// log of the inner product of one chain for exit position (v, k); uses
// precomputed log(sigma W-hat_h).
double log_inner(const SpanningGeometry& g, const PathData& d, const std::vector<double>& log_sw,
                 long long k) {
    const std::size_t j = d.path.size();
    double acc = 0.0;
    // i = 0 contributes only when the geometry branches at the root.
    for (std::size_t i = 0; i + 1 < j; ++i)
        acc += static_cast<double>(d.side_n[i]) * log_sw[static_cast<std::size_t>(d.h_n[i])];
    const long long n_v = g.nodes[static_cast<std::size_t>(d.path[j - 1])].n;
    const long long h_parent = d.h_n[j - 2] + k;
    const double expo = static_cast<double>(d.side_n[j - 1] + (n_v - k));
    acc += expo * log_sw[static_cast<std::size_t>(h_parent)];
    return acc;
}

void chain_logs(const WeightChain& chain, long long N, std::vector<double>& log_sw) {
    if (static_cast<long long>(chain.w.size()) < N + 1)
        throw std::invalid_argument("finite_rpoint: chain shorter than N");
    log_sw.resize(static_cast<std::size_t>(N) + 1);
    for (long long h = 0; h <= N; ++h)
        log_sw[static_cast<std::size_t>(h)] =
            std::log(chain.params.sigma * dual(chain.params, chain.w[static_cast<std::size_t>(h)]));
}

}  // namespace

McEstimate finite_rpoint(const SpanningGeometry& geom, const std::vector<WeightChain>& chains,
                         RpointMode mode, int v, long long k) {
    if (chains.size() < 2) throw std::invalid_argument("finite_rpoint: need >= 2 chains");
    const long long N = geom.total_edges();
    if (N <= 0) throw std::invalid_argument("finite_rpoint: geometry has no integer lengths");
    const int sigma = chains.front().params.sigma;

    std::vector<PathData> paths;
    for (std::size_t s = 1; s < geom.nodes.size(); ++s) paths.push_back(path_data(geom, static_cast<int>(s)));

    std::vector<double> values(chains.size());
    std::vector<double> log_sw;
    for (std::size_t c = 0; c < chains.size(); ++c) {
        chain_logs(chains[c], N, log_sw);
        if (mode == RpointMode::joint) {
            const PathData& d = paths[static_cast<std::size_t>(v) - 1];
            const long long n_v = geom.nodes[static_cast<std::size_t>(v)].n;
            if (!(k >= 0 && k <= n_v)) throw std::domain_error("finite_rpoint: k outside [0, n_v]");
            values[c] = std::exp(log_inner(geom, d, log_sw, k));
        } else {
            double sum = 0.0;
            for (std::size_t s = 0; s < paths.size(); ++s) {
                const int seg = static_cast<int>(s) + 1;
                const long long n_v = geom.nodes[static_cast<std::size_t>(seg)].n;
                const int node_boundary = sigma - segment_child_count(geom, seg);
                for (long long kk = 1; kk <= n_v; ++kk) {
                    const double mult = kk < n_v ? sigma - 1 : node_boundary;
                    if (mult > 0.0) sum += mult * std::exp(log_inner(geom, paths[s], log_sw, kk));
                }
            }
            values[c] = sum / (static_cast<double>(sigma - 1) * static_cast<double>(N));
        }
    }
    return mc_estimate(values, chains.front().seed);
}

McEstimate finite_exit_density(const SpanningGeometry& geom, const std::vector<WeightChain>& chains,
                               int v, long long k) {
    // Joint and summed values share the chain set; the ratio SE comes from
    // the delta method on the paired samples.
    std::vector<double> a(chains.size()), b(chains.size());
    const long long N = geom.total_edges();
    std::vector<PathData> paths;
    for (std::size_t s = 1; s < geom.nodes.size(); ++s) paths.push_back(path_data(geom, static_cast<int>(s)));
    const int sigma = chains.front().params.sigma;
    std::vector<double> log_sw;
    for (std::size_t c = 0; c < chains.size(); ++c) {
        chain_logs(chains[c], N, log_sw);
        a[c] = std::exp(log_inner(geom, paths[static_cast<std::size_t>(v) - 1], log_sw, k));
        double sum = 0.0;
        for (std::size_t s = 0; s < paths.size(); ++s) {
            const int seg = static_cast<int>(s) + 1;
            const long long n_v = geom.nodes[static_cast<std::size_t>(seg)].n;
            const int node_boundary = sigma - segment_child_count(geom, seg);
            for (long long kk = 1; kk <= n_v; ++kk) {
                const double mult = kk < n_v ? sigma - 1 : node_boundary;
                if (mult > 0.0) sum += mult * std::exp(log_inner(geom, paths[s], log_sw, kk));
            }
        }
        b[c] = sum / (static_cast<double>(sigma - 1) * static_cast<double>(N));
    }
    const McEstimate ea = mc_estimate(a), eb = mc_estimate(b);
    const double ratio = ea.mean / eb.mean;
    double var = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const double d = a[c] - ratio * b[c];
        var += d * d;
    }
    var /= static_cast<double>(chains.size() - 1) * static_cast<double>(chains.size());
    return {ratio, std::sqrt(var) / eb.mean, chains.size(), chains.front().seed};
}

IicRpoint iic_rpoint(long long N, int sigma) {
    if (N < 1 || sigma < 2) throw std::domain_error("iic_rpoint: need N >= 1, sigma >= 2");
    const double boundary = static_cast<double>(N) * (sigma - 1) + sigma;
    return {boundary, 1.0 / boundary};
}

}  // namespace invtree
