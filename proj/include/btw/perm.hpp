#pragma once
#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace btw {

// Bijection of {0,1,2,3}; img[i] is the image of i.
struct Perm4 {
    std::array<std::uint8_t, 4> img{0, 1, 2, 3};

    constexpr Perm4() = default;
    constexpr Perm4(int a, int b, int c, int d)
        : img{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
              static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)} {}

    constexpr int operator[](int i) const { return img[static_cast<std::size_t>(i)]; }

    bool valid() const;
    int sign() const;
    constexpr Perm4 inverse() const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img[img[i]] = static_cast<std::uint8_t>(i);
        return r;
    }
    // (p * q)[i] == p[q[i]]
    constexpr Perm4 operator*(const Perm4& q) const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img[i] = img[q.img[i]];
        return r;
    }

    // Lexicographic rank in 0..23 (Lehmer code).
    constexpr int index() const {
        constexpr int fact[3] = {6, 2, 1};
        int idx = 0;
        for (int i = 0; i < 3; ++i) {
            int smaller = 0;
            for (int j = i + 1; j < 4; ++j)
                if (img[j] < img[i]) ++smaller;
            idx += smaller * fact[i];
        }
        return idx;
    }
    static Perm4 from_index(int k);
    static const std::array<Perm4, 24>& all();

    std::string str() const;

    auto operator<=>(const Perm4&) const = default;
};

// The six edges of a tetrahedron, indexed lexicographically.
inline constexpr int kEdgeVerts[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
inline constexpr int kEdgeIndex[4][4] = {
    {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};

inline constexpr int edge_index(int a, int b) { return kEdgeIndex[a][b]; }

// The two vertices not in {a,b}, ascending.
inline constexpr std::array<int, 2> complement_pair(int a, int b) {
    std::array<int, 2> out{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
        if (v != a && v != b) out[static_cast<std::size_t>(k++)] = v;
    return out;
}

// Sign of the sequence (a,b,c,d) read as a permutation of 0..3.
int sequence_sign(int a, int b, int c, int d);

}  // namespace btw
