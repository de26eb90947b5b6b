#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ccopt/combinatorics.hpp"
#include "ccopt/errors.hpp"

namespace ccopt {

// The candidate file sections for (U, M): every M-subset of users, in
// lexicographic order. Section l is stored verbatim at support[l].
struct SectionSet {
    int users = 0;
    int copies = 0;                           // users storing each section
    std::vector<std::vector<int>> support;    // L x copies, ascending user ids
    std::vector<std::vector<std::uint8_t>> b; // L x users indicator rows

    int count() const { return static_cast<int>(support.size()); }
    bool stores(int l, int i) const { return b[l][i] != 0; }
};

inline SectionSet enumerate_sections(int users, int copies) {
    if (copies < 0 || copies > users)
        throw ConfigError("enumerate_sections: need 0 <= copies <= users");
    SectionSet s;
    s.users = users;
    s.copies = copies;
    s.support = subsets_lex(users, copies);
    s.b.assign(s.support.size(), std::vector<std::uint8_t>(users, 0));
    for (std::size_t l = 0; l < s.support.size(); ++l)
        for (int i : s.support[l]) s.b[l][i] = 1;
    return s;
}

inline std::vector<std::vector<int>> enumerate_combinations(int users, int group) {
    if (group < 0 || group > users)
        throw ConfigError("enumerate_combinations: need 0 <= group size <= users");
    return subsets_lex(users, group);
}

// One simultaneous transmission: active user combo[t] receives section
// row[t]. Equivalent to a sections-by-users 0/1 matrix with one 1 per
// active column.
struct ModeMatrix {
    std::vector<int> combo;
    std::vector<int> row;

    std::vector<std::vector<std::uint8_t>> to_dense(int num_sections, int users) const {
        std::vector<std::vector<std::uint8_t>> e(num_sections,
                                                 std::vector<std::uint8_t>(users, 0));
        for (std::size_t t = 0; t < combo.size(); ++t) e[row[t]][combo[t]] = 1;
        return e;
    }
};

// Sections each active user may receive: stored elsewhere in the group and
// not at the user itself. Every list has size C(M+N-1, M).
inline std::vector<std::vector<int>> mode_column_choices(const std::vector<int>& combo,
                                                         const SectionSet& sections) {
    std::vector<std::uint8_t> in_combo(sections.users, 0);
    for (int i : combo) in_combo[i] = 1;
    std::vector<std::vector<int>> choices(combo.size());
    for (std::size_t t = 0; t < combo.size(); ++t) {
        const int i = combo[t];
        for (int l = 0; l < sections.count(); ++l) {
            if (sections.stores(l, i)) continue;
            bool inside = true;
            for (int s : sections.support[l])
                if (!in_combo[s]) { inside = false; break; }
            if (inside) choices[t].push_back(l);
        }
    }
    return choices;
}

// Modes of one combination in mixed-radix order (first column most
// significant, per-column choices lexicographic by section index).
inline void for_each_mode(const std::vector<int>& combo, const SectionSet& sections,
                          const std::function<void(const ModeMatrix&)>& fn) {
    const auto choices = mode_column_choices(combo, sections);
    const std::size_t k = combo.size();
    for (const auto& c : choices)
        if (c.empty()) return; // no valid mode (impossible for k = M+N)
    std::vector<std::size_t> idx(k, 0);
    ModeMatrix mode;
    mode.combo = combo;
    mode.row.resize(k);
    while (true) {
        for (std::size_t t = 0; t < k; ++t) mode.row[t] = choices[t][idx[t]];
        fn(mode);
        std::size_t t = k;
        while (t > 0) {
            --t;
            if (++idx[t] < choices[t].size()) break;
            idx[t] = 0;
            if (t == 0) return;
        }
        if (k == 0) return;
    }
}

inline std::vector<ModeMatrix> enumerate_modes(const std::vector<int>& combo,
                                               const SectionSet& sections) {
    std::vector<ModeMatrix> out;
    for_each_mode(combo, sections, [&](const ModeMatrix& m) { out.push_back(m); });
    return out;
}

// Mode at a given ordinal in the for_each_mode order.
inline ModeMatrix mode_from_ordinal(const std::vector<int>& combo, const SectionSet& sections,
                                    std::uint64_t ordinal) {
    const auto choices = mode_column_choices(combo, sections);
    ModeMatrix mode;
    mode.combo = combo;
    mode.row.resize(combo.size());
    for (std::size_t t = combo.size(); t-- > 0;) {
        const std::uint64_t radix = choices[t].size();
        mode.row[t] = choices[t][static_cast<std::size_t>(ordinal % radix)];
        ordinal /= radix;
    }
    if (ordinal != 0) throw ConfigError("mode_from_ordinal: ordinal out of range");
    return mode;
}

struct ModeCheck {
    bool ok = true;
    std::string violation; // first failed condition: C1..C5 or "combination"
};

// Literal check of the mode-matrix conditions on a dense matrix:
//  C1 binary entries; C2 at most one 1 per column; C3 exactly M+N ones;
//  C4 no delivery of a section to a user that stores it; C5 used rows draw
//  their storage only from active columns. Finally all ones must sit in
//  columns of the given combination.
inline ModeCheck validate_mode(const std::vector<std::vector<int>>& e,
                               const SectionSet& sections, const std::vector<int>& combo) {
    ModeCheck r;
    const int num_sections = sections.count();
    const int users = sections.users;
    if (static_cast<int>(e.size()) != num_sections)
        throw ConfigError("validate_mode: matrix must have one row per section");
    for (const auto& row : e)
        if (static_cast<int>(row.size()) != users)
            throw ConfigError("validate_mode: matrix must have one column per user");

    for (int l = 0; l < num_sections; ++l)
        for (int i = 0; i < users; ++i)
            if (e[l][i] != 0 && e[l][i] != 1) { r.ok = false; r.violation = "C1"; return r; }

    std::vector<int> col_sum(users, 0);
    int total = 0;
    for (int l = 0; l < num_sections; ++l)
        for (int i = 0; i < users; ++i) {
            col_sum[i] += e[l][i];
            total += e[l][i];
        }
    for (int i = 0; i < users; ++i)
        if (col_sum[i] > 1) { r.ok = false; r.violation = "C2"; return r; }

    const int group = static_cast<int>(combo.size());
    if (total != group) { r.ok = false; r.violation = "C3"; return r; }

    for (int l = 0; l < num_sections; ++l)
        for (int i = 0; i < users; ++i)
            if (e[l][i] == 1 && sections.stores(l, i)) {
                r.ok = false;
                r.violation = "C4";
                return r;
            }

    for (int l = 0; l < num_sections; ++l) {
        bool used = false;
        for (int i = 0; i < users; ++i) used = used || e[l][i] == 1;
        if (!used) continue;
        for (int s : sections.support[l])
            if (col_sum[s] == 0) { r.ok = false; r.violation = "C5"; return r; }
    }

    std::vector<std::uint8_t> in_combo(users, 0);
    for (int i : combo) in_combo[i] = 1;
    for (int i = 0; i < users; ++i)
        if (col_sum[i] == 1 && !in_combo[i]) {
            r.ok = false;
            r.violation = "combination";
            return r;
        }
    return r;
}

// Total variable count of the delivery program: sections plus modes over all
// combinations, C(U,M) + C(U,M+N) * C(M+N-1,M)^(M+N).
inline std::uint64_t variable_count(int users, int copies, int dim) {
    const std::uint64_t sections = binomial(users, copies);
    const std::uint64_t combos = binomial(users, copies + dim);
    const std::uint64_t per_combo =
        checked_pow(binomial(copies + dim - 1, copies), static_cast<unsigned>(copies + dim));
    return sections + checked_mul(combos, per_combo);
}

// Row count of the delivery program: C(U,M)*(U-M) + 1.
inline std::uint64_t constraint_count(int users, int copies) {
    return binomial(users, copies) * static_cast<std::uint64_t>(users - copies) + 1;
}

} // namespace ccopt
