#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/pb_semigroup.hpp"

namespace dmet {

// A set of mutually equivalent non-zero idempotents of S. Equivalence of e
// and f means some s has s·s* = e and s*·s = f; the witness search runs
// eagerly at construction so malformed sets fail fast.
struct PhiSet {
    std::vector<int> members;

    int size() const { return static_cast<int>(members.size()); }
    int position_of(int element) const {
        for (int i = 0; i < size(); ++i)
            if (members[i] == element) return i;
        return -1;
    }
};

template <InverseSemigroupLike S>
PhiSet make_phi_set(const S& s, std::vector<int> members) {
    if (members.empty()) throw std::invalid_argument("PhiSet: needs at least one idempotent");
    for (int e : members) {
        if (e == s.zero()) throw std::invalid_argument("PhiSet: zero is not allowed");
        if (!is_idempotent(s, e))
            throw std::invalid_argument("PhiSet: " + s.describe(e) + " is not idempotent");
    }
    for (size_t i = 0; i < members.size(); ++i)
        for (size_t j = i + 1; j < members.size(); ++j) {
            bool linked = false;
            for (int u = 0; u < s.size() && !linked; ++u)
                linked = s.product(u, s.star(u)) == members[i] &&
                         s.product(s.star(u), u) == members[j];
            if (!linked)
                throw std::invalid_argument("PhiSet: idempotents " + s.describe(members[i]) +
                                            " and " + s.describe(members[j]) +
                                            " are not equivalent");
        }
    return PhiSet{std::move(members)};
}

// Membership certificate: for each e in Phi, which branch of the defining
// condition held, and the partner f when the non-zero branch applied.
struct SPhiCertificate {
    struct Entry {
        int e = -1;
        bool zero_branch = false;
        std::vector<int> partners;  // all f in Phi satisfying se = fs, f s s* = f
    };

    bool member = false;
    std::vector<Entry> forward;   // conditions checked on s
    std::vector<Entry> backward;  // conditions checked on star(s)
    std::string reason;
};

namespace detail {

// One side of the S(Phi) condition: for every e in Phi, e·s*·s is 0 or e,
// and in the latter case some f in Phi has s·e = f·s with f·s·s* = f.
template <InverseSemigroupLike S>
bool sphi_side(const S& sg, int s, const PhiSet& phi, std::vector<SPhiCertificate::Entry>& entries,
               std::string& reason) {
    const int ss = sg.product(sg.star(s), s);   // s*·s
    const int proj = sg.product(s, sg.star(s)); // s·s*
    for (int e : phi.members) {
        SPhiCertificate::Entry entry;
        entry.e = e;
        const int ess = sg.product(e, ss);
        if (ess == sg.zero()) {
            entry.zero_branch = true;
            entries.push_back(std::move(entry));
            continue;
        }
        if (ess != e) {
            reason = "e·s*·s is neither 0 nor e for e = " + sg.describe(e);
            return false;
        }
        for (int f : phi.members)
            if (sg.product(s, e) == sg.product(f, s) && sg.product(f, proj) == f)
                entry.partners.push_back(f);
        if (entry.partners.empty()) {
            reason = "no partner f in Phi for e = " + sg.describe(e);
            return false;
        }
        entries.push_back(std::move(entry));
    }
    return true;
}

}  // namespace detail

template <InverseSemigroupLike S>
SPhiCertificate is_in_SPhi(const S& sg, int s, const PhiSet& phi) {
    SPhiCertificate cert;
    if (!detail::sphi_side(sg, s, phi, cert.forward, cert.reason)) return cert;
    if (!detail::sphi_side(sg, sg.star(s), phi, cert.backward, cert.reason)) return cert;
    cert.member = true;
    return cert;
}

// The partial bijection alpha_s on Phi positions: domain A(s) = {e : e·s*·s = e},
// alpha(e) = the unique partner f.
template <InverseSemigroupLike S>
PartialBijection alpha(const S& sg, int s, const PhiSet& phi) {
    SPhiCertificate cert = is_in_SPhi(sg, s, phi);
    if (!cert.member)
        throw std::invalid_argument("alpha: element is not in S_Phi (" + cert.reason + ")");
    PartialBijection a(phi.size());
    for (const auto& entry : cert.forward) {
        if (entry.zero_branch) continue;
        a.set(phi.position_of(entry.e), phi.position_of(entry.partners.front()));
    }
    return a;
}

struct SPhiEnumeration {
    struct Item {
        int element;
        SPhiCertificate certificate;
        PartialBijection alpha_image;
    };

    std::vector<Item> items;                                  // every member of S_Phi
    std::map<PartialBijection, std::vector<int>> classes;     // alpha image -> element ids

    int element_count() const { return static_cast<int>(items.size()); }
    int class_count() const { return static_cast<int>(classes.size()); }
};

template <InverseSemigroupLike S>
SPhiEnumeration enumerate_SPhi(const S& sg, const PhiSet& phi) {
    SPhiEnumeration out;
    for (int s = 0; s < sg.size(); ++s) {
        SPhiCertificate cert = is_in_SPhi(sg, s, phi);
        if (!cert.member) continue;
        PartialBijection a(phi.size());
        for (const auto& entry : cert.forward)
            if (!entry.zero_branch)
                a.set(phi.position_of(entry.e), phi.position_of(entry.partners.front()));
        out.classes[a].push_back(s);
        out.items.push_back({s, std::move(cert), std::move(a)});
    }
    return out;
}

}  // namespace dmet
