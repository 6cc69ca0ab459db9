#pragma once

#include "ecds/bits.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecds {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3/4", "0.25", "2" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
double to_double(const Rational& q);

/// Binary entropy in bits, H(0) = H(1) = 0.
double binary_entropy(double p);

struct BoundReport {
    std::string name;
    std::string formula;
    nlohmann::json inputs;
    double value = 0.0;
    /// Exact rational value when the inputs allow one.
    std::optional<Rational> exact;
};

nlohmann::json to_json(const BoundReport& report);

/// log2 B(n,r) - 2 log2(1/(2 beta)); requires 0 < beta <= 1/2.
BoundReport ip_comm_lower_bound(std::size_t n, std::size_t r, const Rational& beta);

/// 1/2 * 2^((log2 B(n,r) - 2 log2(1/(1-2 eps)) - 1)/p); requires 0 <= eps < 1/2, p >= 1.
BoundReport ip_ds_lower_bound(std::size_t n, std::size_t r, const Rational& eps, std::size_t p);

/// 1/(delta (1 - H(eps))); requires delta > 0, 0 <= eps < 1/2.
BoundReport katz_trevisan_threshold(double delta, double eps);

/// log2 B(n, s).
BoundReport membership_trivial_lb(std::size_t n, std::size_t s);

/// log2 of a non-negative big integer, accurate to double precision.
double log2_big(const BigInt& v);

/// The 2^n x B(n,r) matrix with entries (-1)^{x.y}; rows are x in cube order,
/// columns are weight-<=r strings y in lexicographic order.
class SignMatrix {
public:
    static constexpr std::size_t kMaxN = 12;
    static constexpr std::size_t kMaxColumns = 4096;

    /// Throws std::length_error beyond n = 12 or B(n,r) = 4096.
    SignMatrix(std::size_t n, std::size_t r);

    std::size_t n() const noexcept { return n_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    int entry(std::size_t x, std::size_t y) const { return negative_[y][x] ? -1 : 1; }

    /// M^T M == 2^n I, checked exactly.
    bool gram_is_scaled_identity() const;
    /// Sum of entries over rows where `row_set` is true and columns where `col_set` is true.
    std::int64_t rectangle_sum(const std::vector<char>& row_set, const std::vector<char>& col_set) const;

private:
    std::size_t n_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<BitString> negative_;  // per column, rows with entry -1
};

struct RectangleCheck {
    std::int64_t entry_sum = 0;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    /// |sum| / (2^n B(n,r))
    double discrepancy = 0.0;
    /// sqrt(|R|) / (sqrt(2^n) B(n,r))
    double bound = 0.0;
    /// Exact: sum^2 <= |A| |B| 2^n.
    bool within_bound = false;
};

RectangleCheck check_rectangle(const SignMatrix& m, const std::vector<char>& row_set, const std::vector<char>& col_set);

struct DiscrepancyReport {
    std::size_t n = 0;
    std::size_t r = 0;
    bool gram_identity = false;
    bool exhaustive = false;
    std::uint64_t rectangles = 0;
    std::uint64_t violations = 0;
    /// Largest discrepancy / bound over checked non-empty rectangles.
    double max_ratio = 0.0;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const DiscrepancyReport& report);

/// Largest number of rectangles checked exhaustively.
inline constexpr std::uint64_t kExhaustiveRectangleLimit = std::uint64_t{1} << 20;

/// Gram identity plus the rectangle bound: on all rectangles when
/// 2^(2^n) * 2^B(n,r) <= 2^20, otherwise on `samples` random rectangles
/// (each row and column kept with probability 1/2) drawn from `seed`.
DiscrepancyReport discrepancy_verify(std::size_t n, std::size_t r, std::uint64_t samples = 10'000,
                                     std::uint64_t seed = 1);

} // namespace ecds
