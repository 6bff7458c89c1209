#include "rpa/poles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rpa {

std::vector<Complex> PoleSpec::expand() const {
    std::vector<Complex> out;
    out.reserve(static_cast<size_t>(n));
    for (const PoleGroup& g : groups) {
        for (int k = 0; k < g.mult; ++k) {
            out.push_back(g.value);
            if (g.is_complex()) out.push_back(std::conj(g.value));
        }
    }
    return out;
}

namespace {

struct Key {
    double re, im;
    bool operator<(const Key& o) const {
        if (re != o.re) return re < o.re;
        return im < o.im;
    }
    bool operator==(const Key& o) const { return re == o.re && im == o.im; }
};

std::string fmt_value(const Key& k) {
    std::ostringstream os;
    os << "(" << k.re << ", " << k.im << ")";
    return os.str();
}

}  // namespace

PoleSpec build_pole_spec(const std::vector<RawPole>& entries, int n, PoleOrder order,
                         bool conjugate_pairs, double imag_tol) {
    if (n < 1) throw InvalidInput("build_pole_spec: state dimension must be positive");
    if (entries.empty()) throw InvalidInput("build_pole_spec: empty pole list");
    if (imag_tol < 0.0) throw InvalidInput("build_pole_spec: negative imag_tol");

    // Canonicalize: snap near-real values, fold pair-convention entries onto im > 0.
    struct Item {
        Key key;
        int mult;
    };
    std::vector<Item> items;
    items.reserve(entries.size());
    for (const RawPole& p : entries) {
        if (!std::isfinite(p.re) || !std::isfinite(p.im))
            throw InvalidInput("build_pole_spec: non-finite pole value");
        if (p.mult < 1) throw InvalidInput("build_pole_spec: multiplicity must be >= 1");
        double im = std::abs(p.im) <= imag_tol ? 0.0 : p.im;
        if (conjugate_pairs && im != 0.0) im = std::abs(im);
        items.push_back({{p.re, im}, p.mult});
    }

    // Merge equal values. AsGiven only tolerates adjacent repeats.
    std::vector<Item> merged;
    std::map<Key, size_t> pos;
    for (size_t i = 0; i < items.size(); ++i) {
        auto it = pos.find(items[i].key);
        if (it == pos.end()) {
            pos.emplace(items[i].key, merged.size());
            merged.push_back(items[i]);
        } else {
            if (order == PoleOrder::AsGiven && items[i - 1].key == items[i].key) {
                merged[it->second].mult += items[i].mult;
            } else if (order == PoleOrder::AsGiven) {
                throw DuplicateSplitGroup("build_pole_spec: pole " + fmt_value(items[i].key) +
                                          " listed in separate places under as-given order");
            } else {
                merged[it->second].mult += items[i].mult;
            }
        }
    }

    // Conjugate closure: fold explicit lower halves into their mates. A pair
    // group keeps the position of whichever half was listed first.
    std::vector<std::pair<size_t, PoleGroup>> tagged;
    for (size_t i = 0; i < merged.size(); ++i) {
        const Item& it = merged[i];
        if (it.key.im < 0.0) {
            auto mate = pos.find({it.key.re, -it.key.im});
            if (mate == pos.end())
                throw NotConjugateClosed("build_pole_spec: pole " + fmt_value(it.key) +
                                         " has no conjugate");
            continue;  // counted by its upper-half mate
        }
        PoleGroup g;
        g.value = Complex(it.key.re, it.key.im);
        g.mult = it.mult;
        size_t order_idx = i;
        if (it.key.im > 0.0 && !conjugate_pairs) {
            auto mate = pos.find({it.key.re, -it.key.im});
            if (mate == pos.end())
                throw NotConjugateClosed("build_pole_spec: pole " + fmt_value(it.key) +
                                         " has no conjugate");
            if (merged[mate->second].mult != it.mult)
                throw NotConjugateClosed("build_pole_spec: pole " + fmt_value(it.key) +
                                         " and its conjugate differ in multiplicity");
            order_idx = std::min(order_idx, mate->second);
        }
        tagged.emplace_back(order_idx, g);
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<PoleGroup> groups;
    groups.reserve(tagged.size());
    for (auto& t : tagged) groups.push_back(t.second);

    if (order == PoleOrder::Ascending) {
        std::stable_sort(groups.begin(), groups.end(), [](const PoleGroup& a, const PoleGroup& b) {
            if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
            const double ia = std::abs(a.value.imag()), ib = std::abs(b.value.imag());
            if (ia != ib) return ia < ib;
            return a.mult > b.mult;
        });
    }

    int total = 0;
    for (const PoleGroup& g : groups) total += g.dim();
    if (total != n) {
        std::ostringstream os;
        os << "build_pole_spec: poles span dimension " << total << ", system has " << n;
        throw InvalidInput(os.str());
    }

    PoleSpec spec;
    spec.groups = std::move(groups);
    spec.n = n;
    return spec;
}

}  // namespace rpa
