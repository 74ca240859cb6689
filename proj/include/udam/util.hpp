#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace udam {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

// Enumerates tuples over per-position candidate lists in lexicographic order.
// Candidates are arbitrary integer ids; the callback receives the current tuple.
inline void for_each_tuple(const std::vector<std::vector<int>>& candidates,
                           const std::function<void(const std::vector<int>&)>& fn) {
    const std::size_t n = candidates.size();
    for (const auto& c : candidates)
        if (c.empty()) return;
    std::vector<int> tuple(n);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) tuple[i] = candidates[i][idx[i]];
        fn(tuple);
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < candidates[pos].size()) break;
            idx[pos] = 0;
            if (pos == 0) return;
        }
        if (n == 0) return;
    }
}

inline long long count_tuples(const std::vector<std::vector<int>>& candidates) {
    long long total = 1;
    for (const auto& c : candidates) total *= static_cast<long long>(c.size());
    return total;
}

// Exact rational with normalized sign and gcd-reduced terms. Enough for the
// edit-cost arithmetic, which never leaves small integers.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return a == b || a < b;
    }

    std::string str() const {
        std::ostringstream os;
        os << num;
        if (den != 1) os << "/" << den;
        return os.str();
    }
};

}  // namespace udam
