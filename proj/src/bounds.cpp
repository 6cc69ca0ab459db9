#include "ecds/bounds.hpp"

#include "ecds/random.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ecds {

Rational parse_rational(std::string_view text)
{
    const auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) {
        throw fail();
    }
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const Rational num = parse_rational(text.substr(0, slash));
        const Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) {
            throw fail();
        }
        return num / den;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    BigInt digits = 0;
    BigInt scale = 1;
    bool seen_digit = false;
    bool after_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == '.' && !after_point) {
            after_point = true;
        } else if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            if (after_point) {
                scale *= 10;
            }
            seen_digit = true;
        } else {
            throw fail();
        }
    }
    if (!seen_digit) {
        throw fail();
    }
    Rational out(digits, scale);
    return negative ? Rational(-out) : out;
}

double to_double(const Rational& q)
{
    return q.convert_to<double>();
}

double binary_entropy(double p)
{
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("binary entropy needs p in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double log2_big(const BigInt& v)
{
    if (v <= 0) {
        throw std::invalid_argument("log2 of a non-positive integer");
    }
    const std::size_t bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 53) {
        return std::log2(v.convert_to<double>());
    }
    const std::size_t shift = bits - 53;
    const BigInt top = v >> shift;
    return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

nlohmann::json to_json(const BoundReport& report)
{
    nlohmann::json out = {{"kind", "bound"},
                          {"provenance", "formula"},
                          {"name", report.name},
                          {"formula", report.formula},
                          {"inputs", report.inputs},
                          {"value", report.value}};
    if (report.exact) {
        out["exact"] = report.exact->str();
    }
    return out;
}

BoundReport ip_comm_lower_bound(std::size_t n, std::size_t r, const Rational& beta)
{
    if (beta <= 0 || beta > Rational(1, 2)) {
        throw std::invalid_argument("communication bound needs 0 < beta <= 1/2");
    }
    if (r > n) {
        throw InconsistentParameters("communication bound needs r <= n");
    }
    const BigInt count = bounded_weight_count(n, r);
    const double value = log2_big(count) - 2.0 * std::log2(1.0 / (2.0 * to_double(beta)));
    BoundReport out{"ip_communication_lower_bound",
                    "log2 B(n,r) - 2 log2(1/(2 beta))",
                    {{"n", n}, {"r", r}, {"beta", beta.str()}, {"B", count.str()}},
                    value,
                    std::nullopt};
    return out;
}

BoundReport ip_ds_lower_bound(std::size_t n, std::size_t r, const Rational& eps, std::size_t p)
{
    if (eps < 0 || eps >= Rational(1, 2)) {
        throw std::invalid_argument("data-structure bound needs 0 <= eps < 1/2");
    }
    if (p < 1) {
        throw std::invalid_argument("data-structure bound needs p >= 1");
    }
    if (r > n) {
        throw InconsistentParameters("data-structure bound needs r <= n");
    }
    const BigInt count = bounded_weight_count(n, r);
    const Rational bias = 1 - 2 * eps;
    // exponent = log2(B (1-2eps)^2 / 2) / p
    const double exponent =
        (log2_big(count) + 2.0 * std::log2(to_double(bias)) - 1.0) / static_cast<double>(p);
    BoundReport out{"ip_data_structure_length_lower_bound",
                    "1/2 * 2^((log2 B(n,r) - 2 log2(1/(1-2 eps)) - 1)/p)",
                    {{"n", n}, {"r", r}, {"eps", eps.str()}, {"p", p}, {"B", count.str()}},
                    0.5 * std::exp2(exponent),
                    std::nullopt};
    if (p == 1) {
        out.exact = Rational(count) * bias * bias / 4;
        out.value = to_double(*out.exact);
    }
    return out;
}

BoundReport katz_trevisan_threshold(double delta, double eps)
{
    if (!(delta > 0.0)) {
        throw std::invalid_argument("one-probe threshold needs delta > 0");
    }
    if (!(eps >= 0.0 && eps < 0.5)) {
        throw std::invalid_argument("one-probe threshold needs 0 <= eps < 1/2");
    }
    return {"one_probe_membership_threshold",
            "1/(delta (1 - H(eps)))",
            {{"delta", delta}, {"eps", eps}, {"H(eps)", binary_entropy(eps)}},
            1.0 / (delta * (1.0 - binary_entropy(eps))),
            std::nullopt};
}

BoundReport membership_trivial_lb(std::size_t n, std::size_t s)
{
    if (s > n) {
        throw InconsistentParameters("membership bound needs s <= n");
    }
    const BigInt count = bounded_weight_count(n, s);
    BoundReport out{"membership_counting_lower_bound",
                    "log2 B(n,s)",
                    {{"n", n}, {"s", s}, {"B", count.str()}},
                    log2_big(count),
                    std::nullopt};
    if ((count & (count - 1)) == 0) {
        out.exact = Rational(static_cast<long long>(boost::multiprecision::msb(count)));
    }
    return out;
}

SignMatrix::SignMatrix(std::size_t n, std::size_t r) : n_(n), rows_(0), cols_(0)
{
    if (n > kMaxN) {
        throw std::length_error("sign matrix limited to n <= 12");
    }
    if (r > n) {
        throw InconsistentParameters("sign matrix needs r <= n");
    }
    const BoundedWeightSpace space(n, r);
    if (space.size() > kMaxColumns) {
        throw std::length_error("sign matrix limited to B(n,r) <= 4096 columns");
    }
    rows_ = std::size_t{1} << n;
    cols_ = static_cast<std::size_t>(space.size_u64());
    negative_.reserve(cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        const BitString y = space.unrank(c);
        BitString column(rows_);
        for (std::size_t x = 0; x < rows_; ++x) {
            if (dot_mod2(BitString::from_index(x, n), y)) {
                column.set(x, true);
            }
        }
        negative_.push_back(std::move(column));
    }
}

bool SignMatrix::gram_is_scaled_identity() const
{
    const auto scale = static_cast<std::int64_t>(rows_);
    for (std::size_t a = 0; a < cols_; ++a) {
        for (std::size_t b = a; b < cols_; ++b) {
            // sum_x (-1)^(s_a(x) + s_b(x)) = rows - 2 * #{x : signs differ}
            const auto differ = static_cast<std::int64_t>((negative_[a] ^ negative_[b]).weight());
            const std::int64_t value = scale - 2 * differ;
            if (value != (a == b ? scale : 0)) {
                return false;
            }
        }
    }
    return true;
}

std::int64_t SignMatrix::rectangle_sum(const std::vector<char>& row_set, const std::vector<char>& col_set) const
{
    if (row_set.size() != rows_ || col_set.size() != cols_) {
        throw std::invalid_argument("rectangle does not match the matrix shape");
    }
    std::int64_t total = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
        if (!col_set[c]) {
            continue;
        }
        for (std::size_t x = 0; x < rows_; ++x) {
            if (row_set[x]) {
                total += negative_[c][x] ? -1 : 1;
            }
        }
    }
    return total;
}

namespace {

RectangleCheck evaluate(std::int64_t sum, std::uint64_t rows, std::uint64_t cols, std::size_t n,
                        std::uint64_t total_cols)
{
    RectangleCheck out;
    out.entry_sum = sum;
    out.rows = rows;
    out.cols = cols;
    const double cube = std::ldexp(1.0, static_cast<int>(n));
    out.discrepancy = std::fabs(static_cast<double>(sum)) / (cube * static_cast<double>(total_cols));
    out.bound = std::sqrt(static_cast<double>(rows) * static_cast<double>(cols)) /
                (std::sqrt(cube) * static_cast<double>(total_cols));
    const auto lhs = static_cast<unsigned __int128>(static_cast<__int128>(sum) * sum);
    const auto rhs = static_cast<unsigned __int128>(rows) * cols * (std::uint64_t{1} << n);
    out.within_bound = lhs <= rhs;
    return out;
}

} // namespace

RectangleCheck check_rectangle(const SignMatrix& m, const std::vector<char>& row_set, const std::vector<char>& col_set)
{
    const std::int64_t sum = m.rectangle_sum(row_set, col_set);
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    for (auto v : row_set) {
        rows += v ? 1 : 0;
    }
    for (auto v : col_set) {
        cols += v ? 1 : 0;
    }
    return evaluate(sum, rows, cols, m.n(), m.cols());
}

nlohmann::json to_json(const DiscrepancyReport& report)
{
    return {{"kind", "discrepancy"},
            {"provenance", report.exhaustive ? "exhaustive" : "sampled"},
            {"n", report.n},
            {"r", report.r},
            {"gram_identity", report.gram_identity},
            {"rectangles", report.rectangles},
            {"violations", report.violations},
            {"max_ratio", report.max_ratio},
            {"seed", report.seed}};
}

DiscrepancyReport discrepancy_verify(std::size_t n, std::size_t r, std::uint64_t samples, std::uint64_t seed)
{
    const SignMatrix m(n, r);
    DiscrepancyReport out;
    out.n = n;
    out.r = r;
    out.seed = seed;
    out.gram_identity = m.gram_is_scaled_identity();

    const auto record = [&](const RectangleCheck& check) {
        ++out.rectangles;
        if (!check.within_bound) {
            ++out.violations;
        }
        if (check.bound > 0.0) {
            out.max_ratio = std::max(out.max_ratio, check.discrepancy / check.bound);
        }
    };

    const std::uint64_t log_count = m.rows() + m.cols();
    if (log_count <= 20) {
        out.exhaustive = true;
        const std::uint64_t row_subsets = std::uint64_t{1} << m.rows();
        const std::uint64_t col_subsets = std::uint64_t{1} << m.cols();
        std::vector<std::int64_t> row_sum(m.rows());
        for (std::uint64_t cs = 0; cs < col_subsets; ++cs) {
            // per-row sums over the chosen columns, then a Gray-code walk over row subsets
            std::fill(row_sum.begin(), row_sum.end(), 0);
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if ((cs >> c) & 1u) {
                    for (std::size_t x = 0; x < m.rows(); ++x) {
                        row_sum[x] += m.entry(x, c);
                    }
                }
            }
            const auto cols = static_cast<std::uint64_t>(std::popcount(cs));
            std::int64_t sum = 0;
            std::uint64_t rows = 0;
            std::uint64_t gray = 0;
            record(evaluate(0, 0, cols, n, m.cols()));
            for (std::uint64_t g = 1; g < row_subsets; ++g) {
                const auto flip = static_cast<std::size_t>(std::countr_zero(g));
                gray ^= std::uint64_t{1} << flip;
                if ((gray >> flip) & 1u) {
                    sum += row_sum[flip];
                    ++rows;
                } else {
                    sum -= row_sum[flip];
                    --rows;
                }
                record(evaluate(sum, rows, cols, n, m.cols()));
            }
        }
        return out;
    }

    SeededRandomness rng(derive_seed(seed, 0x72656374, n * 64 + r));
    std::vector<char> row_set(m.rows());
    std::vector<char> col_set(m.cols());
    for (std::uint64_t t = 0; t < samples; ++t) {
        for (auto& v : row_set) {
            v = static_cast<char>(rng.coin());
        }
        for (auto& v : col_set) {
            v = static_cast<char>(rng.coin());
        }
        record(check_rectangle(m, row_set, col_set));
    }
    return out;
}

} // namespace ecds
