#include "btw/perm.hpp"

#include <algorithm>
#include <stdexcept>

namespace btw {

bool Perm4::valid() const {
    unsigned seen = 0;
    for (auto v : img) {
        if (v > 3) return false;
        seen |= 1u << v;
    }
    return seen == 0xF;
}

int Perm4::sign() const {
    int s = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (img[i] > img[j]) s = -s;
    return s;
}

const std::array<Perm4, 24>& Perm4::all() {
    static const std::array<Perm4, 24> table = [] {
        std::array<Perm4, 24> t{};
        std::array<int, 4> p{0, 1, 2, 3};
        int k = 0;
        do {
            t[k++] = Perm4(p[0], p[1], p[2], p[3]);
        } while (std::next_permutation(p.begin(), p.end()));
        return t;
    }();
    return table;
}

Perm4 Perm4::from_index(int k) {
    if (k < 0 || k >= 24) throw std::out_of_range("perm index");
    return all()[static_cast<std::size_t>(k)];
}

std::string Perm4::str() const {
    std::string s;
    for (auto v : img) s.push_back(static_cast<char>('0' + v));
    return s;
}

int sequence_sign(int a, int b, int c, int d) { return Perm4(a, b, c, d).sign(); }

}  // namespace btw
