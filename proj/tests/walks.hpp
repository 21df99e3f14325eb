#pragma once
// Random decorated ideal transits, shared by the unit and acceptance tests.
#include <optional>
#include <random>

#include "btw/moves.hpp"

namespace walks {

using namespace btw;

// One random ideal transit of (T, d); positive moves are skipped once T
// has max_size tets. Returns nullopt when the drawn move is blocked.
template <class D>
std::optional<DecoratedTransit<D>> random_ideal_transit(const Triangulation& T, const D& d, std::mt19937& rng,
                                                        int max_size) {
    std::vector<Move> sites;
    for (auto k : {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q}) {
        if (is_positive(k) && T.size() + tet_delta(k) > max_size) continue;
        for (auto& m : enumerate_sites(T, k)) sites.push_back(m);
    }
    if (sites.empty()) return std::nullopt;
    const Move m = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng)];
    if (is_positive(m.kind)) {
        auto out = enhance_positive(T, m, d);
        if (out.empty()) return std::nullopt;
        return out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
    }
    return enhance_negative(T, m, d).transit;
}

// The positive transit from the end of tr back to its start, when tr is negative.
template <class D>
std::optional<DecoratedTransit<D>> positive_return(const Triangulation& T, const D& d, const DecoratedTransit<D>& tr) {
    const std::string want = decorated_signature(T, d);
    for (auto& back : enhance_positive(tr.result.T, tr.result.inverse, tr.after))
        if (decorated_signature(back.result.T, back.after) == want) return back;
    return std::nullopt;
}

}  // namespace walks
