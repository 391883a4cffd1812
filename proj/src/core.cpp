#include "rsineq/error.hpp"
#include "rsineq/rational.hpp"
#include "rsineq/variable.hpp"

#include <cctype>
#include <limits>
#include <numeric>

namespace rsineq {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Syntax: return "SyntaxError";
        case ErrorCode::DuplicateVariableInGroup: return "DuplicateVariableInGroup";
        case ErrorCode::ZeroCoefficient: return "ZeroCoefficient";
        case ErrorCode::UndeclaredVariable: return "UndeclaredVariable";
        case ErrorCode::InconsistentContext: return "InconsistentContext";
        case ErrorCode::InvalidSequentialPair: return "InvalidSequentialPair";
        case ErrorCode::ResidualDegree: return "ResidualDegreeError";
        case ErrorCode::EvenGroup: return "EvenGroup";
        case ErrorCode::UnmappedVariable: return "UnmappedVariable";
        case ErrorCode::TooManyVariables: return "TooManyVariables";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::InvalidObservation: return "InvalidObservation";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorCode::TermOutsideContext: return "TermOutsideContext";
        case ErrorCode::ProvisoViolated: return "ProvisoViolated";
        case ErrorCode::DivisionByZeroCell: return "DivisionByZeroCell";
        case ErrorCode::NonUnitVector: return "NonUnitVector";
        case ErrorCode::MissingSetting: return "MissingSetting";
        case ErrorCode::MissingAssignment: return "MissingAssignment";
        case ErrorCode::InvalidAssignment: return "InvalidAssignment";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::AssertionFailure: return "AssertionFailure";
    }
    return "Error";
}

VariableId::VariableId(char p, std::optional<std::uint32_t> i) : party(p), index(i) {
    if (p < 'A' || p > 'Z') {
        throw Error(ErrorCode::InvalidArgument, std::string("party letter must be A-Z, got '") + p + "'");
    }
}

VariableId VariableId::parse(std::string_view text) {
    if (text.empty() || text[0] < 'A' || text[0] > 'Z') {
        throw Error(ErrorCode::InvalidArgument, "not a variable name: '" + std::string(text) + "'");
    }
    if (text.size() == 1) return VariableId(text[0]);
    std::uint64_t idx = 0;
    for (char c : text.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw Error(ErrorCode::InvalidArgument, "not a variable name: '" + std::string(text) + "'");
        }
        idx = idx * 10 + static_cast<std::uint64_t>(c - '0');
        if (idx > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(ErrorCode::InvalidArgument, "variable index too large: '" + std::string(text) + "'");
        }
    }
    return VariableId(text[0], static_cast<std::uint32_t>(idx));
}

std::string VariableId::str() const {
    std::string s(1, party);
    if (index) s += std::to_string(*index);
    return s;
}

namespace {

__extension__ using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw Error(ErrorCode::InvalidArgument, "rational overflow");
    }
    return static_cast<std::int64_t>(v);
}

Rational make(i128 n, i128 d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorCode::InvalidArgument, "rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num, den);
    num_ = g > 1 ? num / g : num;
    den_ = g > 1 ? den / g : den;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b) {
    return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) {
    return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}
Rational operator/(Rational a, Rational b) {
    return make(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 lhs = static_cast<i128>(a.num_) * b.den_;
    const i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace rsineq
