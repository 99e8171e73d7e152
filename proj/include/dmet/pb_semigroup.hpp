#pragma once

#include <algorithm>
#include <concepts>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dmet/partial_bijection.hpp"

namespace dmet {

// The generic face of a finite inverse semigroup with 0 and 1: elements are
// addressed by index, products and pseudoinverses are total, and that is all
// the S_Phi construction ever asks for.
template <class S>
concept InverseSemigroupLike = requires(const S& s, int a, int b) {
    { s.size() } -> std::convertible_to<int>;
    { s.product(a, b) } -> std::convertible_to<int>;
    { s.star(a) } -> std::convertible_to<int>;
    { s.zero() } -> std::convertible_to<int>;
    { s.one() } -> std::convertible_to<int>;
    { s.describe(a) } -> std::convertible_to<std::string>;
};

template <InverseSemigroupLike S>
bool is_idempotent(const S& s, int a) {
    return s.product(a, a) == a;
}

// PB(X_n), the archetypal finite inverse semigroup. Elements are enumerated
// once and products resolved through a hash lookup; n above 6 is rejected
// because the element count explodes.
class PBSemigroup {
public:
    explicit PBSemigroup(int n) : n_(n) {
        if (n < 0 || n > 6)
            throw std::invalid_argument("PBSemigroup: n must be between 0 and 6");
        elements_ = all_partial_bijections(n);
        std::sort(elements_.begin(), elements_.end());
        index_.reserve(elements_.size());
        for (int i = 0; i < static_cast<int>(elements_.size()); ++i)
            index_.emplace(elements_[i], i);
        zero_ = index_of(PartialBijection::empty_map(n));
        one_ = index_of(PartialBijection::identity(n));
    }

    int universe() const { return n_; }
    int size() const { return static_cast<int>(elements_.size()); }

    const PartialBijection& element(int i) const { return elements_[i]; }

    int index_of(const PartialBijection& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) throw std::invalid_argument("element not in semigroup");
        return it->second;
    }

    int product(int a, int b) const { return index_.at(compose(elements_[a], elements_[b])); }
    int star(int a) const { return index_.at(elements_[a].inverse()); }
    int zero() const { return zero_; }
    int one() const { return one_; }

    std::string describe(int a) const { return elements_[a].to_string(); }

    std::vector<int> idempotents() const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (elements_[i].is_idempotent()) out.push_back(i);
        return out;
    }

private:
    int n_;
    std::vector<PartialBijection> elements_;
    std::unordered_map<PartialBijection, int, PartialBijectionHash> index_;
    int zero_ = 0, one_ = 0;
};

static_assert(InverseSemigroupLike<PBSemigroup>);

}  // namespace dmet
