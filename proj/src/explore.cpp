// Bounded exploration of restricted ideal transit graphs.
#include <atomic>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "btw/connect.hpp"
#include "btw/decor.hpp"
#include "btw/invariants.hpp"
#include "union_find.hpp"
#include "walker.hpp"

namespace btw {

std::string to_string(Relation r) {
    switch (r) {
        case Relation::FullB: return "full-b";
        case Relation::Sliding: return "sliding";
        case Relation::NA: return "na";
        case Relation::PB: return "pb";
        case Relation::Naked: return "naked";
    }
    return "?";
}

Relation relation_from_string(const std::string& s) {
    if (s == "full-b" || s == "full") return Relation::FullB;
    if (s == "sliding") return Relation::Sliding;
    if (s == "na") return Relation::NA;
    if (s == "pb") return Relation::PB;
    if (s == "naked") return Relation::Naked;
    throw Error("ParseError", "unknown relation " + s);
}

namespace {

using detail::sig;

std::string h1_string(const Triangulation& T, const Skeleton& S) {
    return homology(spine_complex(T, S), 0).h1.str();
}

// Data of [w] that survives automorphisms of H1: vanishing, vanishing mod
// 2, evenness, divisibility of the free part, and the order when torsion.
std::string omega_fingerprint(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    OmegaClass c = omega_class(T, S, w);
    Int g = 0;
    bool free_zero = true;
    Int order = 1;
    for (std::size_t k = 0; k < c.cls.coords.size(); ++k) {
        const Int& x = c.cls.coords[k];
        const Int& m = c.cls.moduli[k];
        if (m == 0) {
            g = boost::multiprecision::gcd(g, abs(x));
            free_zero = free_zero && x == 0;
        } else {
            const Int o = m / boost::multiprecision::gcd(m, abs(x));
            order = order * o / boost::multiprecision::gcd(order, o);
        }
    }
    std::string s = "H1=" + h1_string(T, S) + ";zero=" + (c.cls.is_zero() ? "1" : "0") +
                    ";mod2=" + (c.mod2_zero ? "1" : "0") + ";even=" + (c.even ? "1" : "0") + ";div=" + g.str();
    if (free_zero) s += ";order=" + order.str();
    return s;
}

template <class D>
std::string fingerprint(Relation r, const Triangulation& T, const D& d) {
    Skeleton S = skeleta(T);
    if constexpr (std::is_same_v<D, Branching>) {
        if (r == Relation::Sliding) return bicoloring(T, S, d).fingerprint();
        if (r == Relation::NA) {
            const auto eps = orientation(T).eps;
            return bicoloring(T, S, d).fingerprint() + "|" +
                   boundary_branching(T, S, induced_prebranching(T, S, d, eps), eps).fingerprint(T);
        }
        return "H1=" + h1_string(T, S);
    } else if constexpr (std::is_same_v<D, PreBranching>) {
        return omega_fingerprint(T, S, d);
    } else {
        return "H1=" + h1_string(T, S);
    }
}

// The class of a transit, read on its positive direction.
TransitClass transit_class(const Triangulation& T, const BranchedTransit& tr) {
    if (is_positive(tr.move.kind)) {
        Skeleton S = skeleta(T);
        return tr.move.kind == MoveKind::M23 ? classify_23(T, S, tr.before, tr.move).cls
                                             : classify_02q(T, S, tr.before, tr.move).cls;
    }
    Skeleton S = skeleta(tr.result.T);
    return tr.move.kind == MoveKind::M32 ? classify_23(tr.result.T, S, tr.after, tr.result.inverse).cls
                                         : classify_02q(tr.result.T, S, tr.after, tr.result.inverse).cls;
}

template <class D>
bool admitted(Relation r, const Triangulation& T, const DecoratedTransit<D>& tr) {
    if constexpr (std::is_same_v<D, Branching>) {
        if (r == Relation::Sliding) return transit_class(T, tr) != TransitClass::Bump;
        if (r == Relation::NA) return transit_class(T, tr) == TransitClass::NonAmbiguous;
    }
    (void)r, (void)T, (void)tr;
    return true;
}

template <class D>
struct Cand {
    Step step;
    Triangulation T;
    D d;
    std::string key;
};

template <class D>
std::vector<Cand<D>> expand(Relation r, const Triangulation& T, const D& d, int max_tets) {
    std::vector<Cand<D>> out;
    Skeleton S = skeleta(T);
    for (MoveKind k : {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q}) {
        if (T.size() + tet_delta(k) > max_tets) continue;
        for (const Move& m : enumerate_sites(T, S, k)) {
            std::vector<DecoratedTransit<D>> trs;
            try {
                if (is_positive(k)) {
                    trs = detail::positives(T, m, d);
                } else {
                    auto o = detail::negative(T, m, d);
                    if (!o.blocked()) trs.push_back(std::move(*o.transit));
                }
            } catch (const Error& e) {
                if (e.code != "InvalidSite") throw;
            }
            for (std::size_t c = 0; c < trs.size(); ++c) {
                if (!admitted(r, T, trs[c])) continue;
                std::string key = sig(trs[c].result.T, trs[c].after);
                out.push_back({{m, is_positive(k) ? static_cast<int>(c) : 0},
                               std::move(trs[c].result.T),
                               std::move(trs[c].after),
                               std::move(key)});
            }
        }
    }
    return out;
}

// Runs f(i) for i in [0, n) on all hardware threads.
template <class F>
void parallel_for(std::size_t n, F f) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nt = std::min<std::size_t>(hw, n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            try {
                for (std::size_t i; (i = next++) < n;) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

template <class D>
ExploreResult explore_impl(const std::vector<Triangulation>& starts, const std::vector<D>& decos, Relation r,
                           int depth, int budget, int max_tets) {
    const bool ok = std::is_same_v<D, Branching>
                        ? (r == Relation::FullB || r == Relation::Sliding || r == Relation::NA)
                        : std::is_same_v<D, PreBranching> ? r == Relation::PB : r == Relation::Naked;
    if (!ok) throw Error("InvalidArgument", "relation " + to_string(r) + " needs another decoration");
    if (starts.size() != decos.size()) throw Error("InvalidArgument", "one decoration per start");

    struct Node {
        Triangulation T;
        D d;
        int parent;
        Step step;
        int root;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::string, int> index;
    ExploreResult res;
    res.relation = r;
    detail::UnionFind uf(0);
    auto add = [&](Node n, std::string key) {
        index.emplace(key, static_cast<int>(nodes.size()));
        res.visited.push_back(std::move(key));
        nodes.push_back(std::move(n));
        uf.p.push_back(static_cast<int>(uf.p.size()));
    };

    std::vector<int> frontier;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::string key = sig(starts[s], decos[s]);
        if (index.count(key)) continue;
        frontier.push_back(static_cast<int>(nodes.size()));
        add({starts[s], decos[s], -1, {}, static_cast<int>(s)}, std::move(key));
    }
    int level = 0;
    for (; level < depth && !frontier.empty() && !res.budget_exceeded; ++level) {
        std::vector<std::vector<Cand<D>>> found(frontier.size());
        parallel_for(frontier.size(), [&](std::size_t i) {
            const Node& n = nodes[static_cast<std::size_t>(frontier[i])];
            found[i] = expand(r, n.T, n.d, max_tets);
        });
        // merge in frontier order, so the result does not depend on scheduling
        std::vector<int> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            const int q = frontier[i];
            for (auto& c : found[i]) {
                ++res.edges;
                auto it = index.find(c.key);
                if (it != index.end()) {
                    uf.unite(q, it->second);
                    continue;
                }
                if (static_cast<int>(nodes.size()) >= budget) {
                    res.budget_exceeded = true;
                    continue;
                }
                const int root = nodes[static_cast<std::size_t>(q)].root;
                next.push_back(static_cast<int>(nodes.size()));
                add({std::move(c.T), std::move(c.d), q, c.step, root}, std::move(c.key));
                uf.unite(q, next.back());
            }
        }
        frontier = std::move(next);
    }
    res.exhausted = frontier.empty() && !res.budget_exceeded;

    res.fingerprints.resize(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) { res.fingerprints[k] = fingerprint(r, nodes[k].T, nodes[k].d); });

    std::map<int, int> comp_id;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const int rt = uf.find(static_cast<int>(k));
        auto [it, fresh] = comp_id.emplace(rt, static_cast<int>(res.components.size()));
        if (fresh) res.components.push_back({res.fingerprints[static_cast<std::size_t>(rt)], 0, res.visited[static_cast<std::size_t>(rt)]});
        auto& c = res.components[static_cast<std::size_t>(it->second)];
        ++c.size;
        if (res.fingerprints[k] != c.fingerprint) res.fingerprints_constant = false;
        res.component.push_back(it->second);
    }

    for (std::size_t k = 0; k < nodes.size(); ++k) {
        std::vector<Step> steps;
        int x = static_cast<int>(k);
        for (; nodes[static_cast<std::size_t>(x)].parent >= 0; x = nodes[static_cast<std::size_t>(x)].parent)
            steps.push_back(nodes[static_cast<std::size_t>(x)].step);
        std::reverse(steps.begin(), steps.end());
        res.root.push_back(nodes[k].root);
        res.paths.push_back({detail::decoration_name<D>(), res.visited[static_cast<std::size_t>(x)], res.visited[k],
                             std::move(steps), {}});
    }
    return res;
}

}  // namespace

ExploreResult explore(const std::vector<Triangulation>& starts, const std::vector<Branching>& decorations, Relation r,
                      int depth, int budget, int max_tets) {
    return explore_impl(starts, decorations, r, depth, budget, max_tets);
}

ExploreResult explore(const std::vector<Triangulation>& starts, const std::vector<PreBranching>& decorations,
                      Relation r, int depth, int budget, int max_tets) {
    return explore_impl(starts, decorations, r, depth, budget, max_tets);
}

ExploreResult explore(const std::vector<Triangulation>& starts, Relation r, int depth, int budget, int max_tets) {
    return explore_impl(starts, std::vector<Naked>(starts.size()), r, depth, budget, max_tets);
}

}  // namespace btw
