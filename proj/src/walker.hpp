// Decorated move execution with recording, shared by connect and explore.
#pragma once
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "btw/connect.hpp"

namespace btw::detail {

template <class D>
std::string sig(const Triangulation& T, const D& d) {
    return state_signature(T, d);
}

template <class D>
std::optional<TetLabels> labels(const Triangulation& T, const D& d) {
    Skeleton S = skeleta(T);
    if constexpr (std::is_same_v<D, Branching>)
        return vertex_ranks(T, S, d);
    else if constexpr (std::is_same_v<D, PreBranching>)
        return in_bits(T, S, d);
    else
        return std::nullopt;
}

template <class D>
std::optional<Isomorphism> iso(const Triangulation& A, const D& da, const Triangulation& B, const D& db) {
    auto la = labels(A, da), lb = labels(B, db);
    return isomorphism(A, la ? &*la : nullptr, B, lb ? &*lb : nullptr);
}

template <class D>
std::vector<DecoratedTransit<D>> positives(const Triangulation& T, const Move& m, const D& d) {
    if constexpr (std::is_same_v<D, Naked>) {
        if (!is_positive(m.kind)) throw Error("InvalidSite", to_string(m.kind) + " is not a positive move");
        return {DecoratedTransit<Naked>{m, apply(T, m), {}, {}, true}};
    } else {
        return enhance_positive(T, m, d);
    }
}

template <class D>
NegativeOutcome<D> negative(const Triangulation& T, const Move& m, const D& d) {
    if constexpr (std::is_same_v<D, Naked>) {
        if (is_positive(m.kind)) throw Error("InvalidSite", to_string(m.kind) + " is not a negative move");
        NegativeOutcome<Naked> out;
        out.transit = DecoratedTransit<Naked>{m, apply(T, m), {}, {}, true};
        return out;
    } else {
        return enhance_negative(T, m, d);
    }
}

template <class D>
std::string decoration_name() {
    if constexpr (std::is_same_v<D, Branching>) return "branching";
    else if constexpr (std::is_same_v<D, PreBranching>) return "prebranching";
    else return "none";
}

template <class D>
struct Rec {
    Triangulation before;
    D dbefore;
    DecoratedTransit<D> tr;
    int choice = 0;
};

[[noreturn]] inline void replay_failure(const std::string& why) { throw Error("ReplayFailure", why); }

template <class D>
struct Walker {
    Triangulation T;
    D d;
    std::vector<Step> steps;
    std::vector<Rec<D>> path;
    bool keep_path = true;

    Walker(Triangulation T0, D d0) : T(std::move(T0)), d(std::move(d0)) {}

    const DecoratedTransit<D>& take(DecoratedTransit<D> tr, int choice) {
        steps.push_back({tr.move, choice});
        Triangulation before = std::move(T);
        D dbefore = std::move(d);
        T = tr.result.T;
        d = tr.after;
        if (!keep_path) {
            path.clear();
        }
        path.push_back({std::move(before), std::move(dbefore), std::move(tr), choice});
        return path.back().tr;
    }

    // First positive enhancement accepted by `pred`.
    template <class Pred>
    const DecoratedTransit<D>* positive(const Move& m, Pred pred) {
        auto outs = positives(T, m, d);
        for (std::size_t k = 0; k < outs.size(); ++k)
            if (pred(outs[k])) return &take(std::move(outs[k]), static_cast<int>(k));
        return nullptr;
    }

    const DecoratedTransit<D>* negative_step(const Move& m) {
        auto out = negative(T, m, d);
        if (out.blocked()) return nullptr;
        return &take(std::move(*out.transit), 0);
    }

    const DecoratedTransit<D>* step(const Step& s) {
        if (is_positive(s.move.kind)) {
            auto outs = positives(T, s.move, d);
            if (s.choice < 0 || s.choice >= static_cast<int>(outs.size())) return nullptr;
            return &take(std::move(outs[static_cast<std::size_t>(s.choice)]), s.choice);
        }
        return negative_step(s.move);
    }

    // Performs m (carried from a recorded state) so that the result has
    // signature `target`; an enhancement reproducing `exact` is preferred.
    void matching(const Move& m, const std::string& target, const Triangulation* exactT = nullptr,
                  const D* exactD = nullptr) {
        if (is_positive(m.kind)) {
            auto outs = positives(T, m, d);
            int pick = -1;
            for (std::size_t k = 0; k < outs.size() && pick < 0 && exactT; ++k)
                if (outs[k].result.T == *exactT && outs[k].after == *exactD) pick = static_cast<int>(k);
            for (std::size_t k = 0; k < outs.size() && pick < 0; ++k)
                if (sig(outs[k].result.T, outs[k].after) == target) pick = static_cast<int>(k);
            if (pick < 0) replay_failure("no enhancement of " + to_string(m) + " reaches the recorded state");
            take(std::move(outs[static_cast<std::size_t>(pick)]), pick);
        } else {
            if (!negative_step(m)) replay_failure(to_string(m) + " is blocked");
            if (sig(T, d) != target) replay_failure(to_string(m) + " does not reach the recorded state");
        }
    }

    void append(const Walker& o) {
        steps.insert(steps.end(), o.steps.begin(), o.steps.end());
        path.insert(path.end(), o.path.begin(), o.path.end());
        T = o.T;
        d = o.d;
    }
};

inline std::vector<int> identity_tets(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = k;
    return v;
}

template <class D>
Isomorphism need_iso(const Triangulation& A, const D& da, const Triangulation& B, const D& db) {
    if (A == B && da == db) return {identity_tets(A.size()), std::vector<Perm4>(static_cast<std::size_t>(A.size()))};
    auto f = iso(A, da, B, db);
    if (!f) replay_failure("current state is not isomorphic to the recorded one");
    return *f;
}

// Repeats the recorded path p from w's state (isomorphic to p's start).
template <class D>
void walk_forward(Walker<D>& w, const std::vector<Rec<D>>& p) {
    for (const auto& r : p) {
        Isomorphism f = need_iso(r.before, r.dbefore, w.T, w.d);
        w.matching(transfer(r.before, r.tr.move, w.T, f), sig(r.tr.result.T, r.tr.after), &r.tr.result.T, &r.tr.after);
    }
}

// Runs the recorded path p backwards from w's state, which must be
// isomorphic to (end of p, end_deco). expected[j], when given, replaces the
// recorded decoration of the state before step j.
template <class D>
void walk_back(Walker<D>& w, const std::vector<Rec<D>>& p, const D& end_deco,
               const std::vector<D>* expected = nullptr) {
    D cur = end_deco;
    for (std::size_t k = p.size(); k-- > 0;) {
        const auto& r = p[k];
        Isomorphism f = need_iso(r.tr.result.T, cur, w.T, w.d);
        const D& prev = expected ? (*expected)[k] : r.dbefore;
        w.matching(transfer(r.tr.result.T, r.tr.result.inverse, w.T, f), sig(r.before, prev), &r.before, &prev);
        cur = prev;
    }
}

template <class D>
MoveSequence to_sequence(const Walker<D>& w, const std::string& start) {
    MoveSequence s;
    s.decoration = decoration_name<D>();
    s.start = start;
    s.end = sig(w.T, w.d);
    s.steps = w.steps;
    return s;
}

}  // namespace btw::detail
