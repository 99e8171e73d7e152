#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmet {

// A partial bijection of {0..n-1}: an injective map defined on a subset.
// Stored as the image table with -1 for "undefined", which is already a
// canonical form, so equality and ordering are structural.
class PartialBijection {
public:
    PartialBijection() = default;
    explicit PartialBijection(int n) : img_(n, -1) {}

    static PartialBijection identity(int n) {
        PartialBijection s(n);
        for (int i = 0; i < n; ++i) s.img_[i] = i;
        return s;
    }

    static PartialBijection empty_map(int n) { return PartialBijection(n); }

    static PartialBijection partial_identity(int n, const std::vector<int>& fixed) {
        PartialBijection s(n);
        for (int i : fixed) s.set(i, i);
        return s;
    }

    static PartialBijection of_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
        PartialBijection s(n);
        for (auto [a, b] : pairs) s.set(a, b);
        return s;
    }

    int universe_size() const { return static_cast<int>(img_.size()); }
    int apply(int x) const { return img_[x]; }  // -1 when undefined
    bool defined_at(int x) const { return img_[x] >= 0; }

    void set(int x, int y) {
        if (x < 0 || x >= universe_size() || y < 0 || y >= universe_size())
            throw std::out_of_range("partial bijection point out of range");
        for (int v : img_)
            if (v == y && img_[x] != y) throw std::invalid_argument("mapping not injective");
        img_[x] = y;
    }

    std::vector<int> domain() const {
        std::vector<int> d;
        for (int i = 0; i < universe_size(); ++i)
            if (img_[i] >= 0) d.push_back(i);
        return d;
    }

    std::vector<int> codomain() const {
        std::vector<int> c;
        for (int i = 0; i < universe_size(); ++i)
            if (img_[i] >= 0) c.push_back(img_[i]);
        std::sort(c.begin(), c.end());
        return c;
    }

    int rank() const {
        int r = 0;
        for (int v : img_) r += v >= 0;
        return r;
    }

    PartialBijection inverse() const {
        PartialBijection s(universe_size());
        for (int i = 0; i < universe_size(); ++i)
            if (img_[i] >= 0) s.img_[img_[i]] = i;
        return s;
    }

    // (a ∘ b)(x) = a(b(x)): the right factor acts first, matching the
    // composition order of cross metrics.
    friend PartialBijection compose(const PartialBijection& a, const PartialBijection& b) {
        if (a.universe_size() != b.universe_size())
            throw std::invalid_argument("compose: universes differ");
        PartialBijection s(a.universe_size());
        for (int x = 0; x < b.universe_size(); ++x) {
            int y = b.img_[x];
            if (y >= 0 && a.img_[y] >= 0) s.img_[x] = a.img_[y];
        }
        return s;
    }

    bool is_idempotent() const { return compose(*this, *this) == *this; }

    std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (int i = 0; i < universe_size(); ++i) {
            if (img_[i] < 0) continue;
            if (!first) out += ",";
            out += std::to_string(i) + ">" + std::to_string(img_[i]);
            first = false;
        }
        return out + "}";
    }

    friend bool operator==(const PartialBijection&, const PartialBijection&) = default;
    friend auto operator<=>(const PartialBijection& a, const PartialBijection& b) {
        return a.img_ <=> b.img_;
    }

    const std::vector<int>& raw() const { return img_; }

private:
    std::vector<int> img_;
};

struct PartialBijectionHash {
    std::size_t operator()(const PartialBijection& s) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : s.raw()) {
            h ^= static_cast<std::size_t>(v + 2);
            h *= 1099511628211ull;
        }
        return h;
    }
};

// All partial bijections of {0..n-1}; count is sum over k of C(n,k)^2 k!.
inline std::vector<PartialBijection> all_partial_bijections(int n) {
    std::vector<PartialBijection> out;
    std::vector<int> img(n, -1);
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            PartialBijection s(n);
            for (int i = 0; i < n; ++i)
                if (img[i] >= 0) s.set(i, img[i]);
            out.push_back(std::move(s));
            return;
        }
        img[pos] = -1;
        self(self, pos + 1);
        for (int y = 0; y < n; ++y) {
            if (used[y]) continue;
            used[y] = true;
            img[pos] = y;
            self(self, pos + 1);
            img[pos] = -1;
            used[y] = false;
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace dmet
