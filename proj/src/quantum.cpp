#include "rsineq/quantum.hpp"

#include "rsineq/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rsineq {

BlochVector BlochVector::make(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
        throw Error(ErrorCode::NonUnitVector, "Bloch vector norm " + std::to_string(norm));
    }
    return BlochVector({x, y, z});
}

BlochVector BlochVector::coplanar(double angle) { return BlochVector({std::sin(angle), 0.0, std::cos(angle)}); }

BlochVector BlochVector::spherical(double polar, double azimuth) {
    return BlochVector({std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)});
}

BlochVector BlochVector::operator-() const noexcept { return BlochVector({-v_[0], -v_[1], -v_[2]}); }

double dot(const BlochVector& a, const BlochVector& b) noexcept {
    return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

std::array<double, 3> cross(const BlochVector& a, const BlochVector& b) noexcept {
    return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

ComplexMatrix sigma_dot(const std::array<double, 3>& v) {
    const Complex i(0.0, 1.0);
    return ComplexMatrix(2, {v[2], v[0] - i * v[1], v[0] + i * v[1], -v[2]});
}

ComplexMatrix pauli_observable(const BlochVector& direction) {
    const auto& c = direction.components();
    const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
        throw Error(ErrorCode::NonUnitVector, "observable direction norm " + std::to_string(norm));
    }
    return sigma_dot(c);
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.dim() != 2 && m_.dim() != 4) throw Error(ErrorCode::InvalidState, "state must be one or two qubits");
    if (!m_.is_finite()) throw Error(ErrorCode::InvalidState, "non-finite entry");
    if (!m_.is_hermitian(1e-12)) throw Error(ErrorCode::InvalidState, "state is not Hermitian");
    if (std::abs(m_.trace() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidState, "trace differs from 1");
    const auto eig = hermitian_eigenvalues(m_, 1e-12);
    if (eig.front() < -1e-10) throw Error(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(eig.front()));
}

DensityMatrix DensityMatrix::singlet() {
    const double h = 1.0 / std::sqrt(2.0);
    return from_pure({0.0, h, -h, 0.0});
}

DensityMatrix DensityMatrix::qubit(const BlochVector& n) {
    return DensityMatrix(Complex(0.5) * (ComplexMatrix::identity(2) + sigma_dot(n.components())));
}

DensityMatrix DensityMatrix::product(const BlochVector& nA, const BlochVector& nB) {
    return DensityMatrix(kron(qubit(nA).matrix(), qubit(nB).matrix()));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    return DensityMatrix(Complex(1.0 / static_cast<double>(dim)) * ComplexMatrix::identity(dim));
}

DensityMatrix DensityMatrix::from_pure(const std::vector<Complex>& psi) {
    double norm = 0.0;
    for (auto z : psi) norm += std::norm(z);
    if (std::abs(norm - 1.0) > 1e-12) throw Error(ErrorCode::InvalidState, "state vector is not normalized");
    ComplexMatrix m(psi.size());
    for (std::size_t r = 0; r < psi.size(); ++r) {
        for (std::size_t c = 0; c < psi.size(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
    }
    return DensityMatrix(std::move(m));
}

ComplexMatrix embed(const ComplexMatrix& op, Subsystem subsystem, std::size_t dim) {
    if (op.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "embed expects a one-qubit operator");
    if (dim == 2) {
        if (subsystem != Subsystem::A) throw Error(ErrorCode::DimensionMismatch, "one-qubit state has no subsystem B");
        return op;
    }
    if (dim != 4) throw Error(ErrorCode::DimensionMismatch, "state dimension must be 2 or 4");
    return subsystem == Subsystem::A ? kron(op, ComplexMatrix::identity(2)) : kron(ComplexMatrix::identity(2), op);
}

ComplexMatrix projector(const BlochVector& direction, int outcome) {
    const double s = outcome > 0 ? 1.0 : -1.0;
    return Complex(0.5) * (ComplexMatrix::identity(2) + Complex(s) * pauli_observable(direction));
}

double spatial_correlator(const DensityMatrix& rho, const BlochVector& a, const BlochVector& b) {
    if (rho.dim() != 4) throw Error(ErrorCode::DimensionMismatch, "spatial correlator needs a two-qubit state");
    return (rho.matrix() * kron(pauli_observable(a), pauli_observable(b))).trace().real();
}

double sequential_correlator(const DensityMatrix& rho, Subsystem subsystem, const BlochVector& first,
                             const BlochVector& second) {
    double total = 0.0;
    for (int a : {1, -1}) {
        const ComplexMatrix pa = embed(projector(first, a), subsystem, rho.dim());
        const ComplexMatrix collapsed = pa * rho.matrix() * pa;
        for (int b : {1, -1}) {
            const ComplexMatrix pb = embed(projector(second, b), subsystem, rho.dim());
            total += a * b * (pb * collapsed).trace().real();
        }
    }
    return total;
}

// ---------------------------------------------------------------------------

TermAssignment assign_terms(const CorrelationInequality& ineq, const ScenarioSpec& scenario) {
    std::set<std::string> parties;
    for (const auto& v : ineq.variables()) parties.insert(scenario.party_of(v));
    if (parties.size() > 2) throw Error(ErrorCode::InvalidAssignment, "more than two parties");
    auto subsystem = [&](const VariableId& v) {
        return scenario.party_of(v) == *parties.begin() ? Subsystem::A : Subsystem::B;
    };
    TermAssignment out;
    for (const auto& t : ineq.terms) {
        TermRule r{t.first, t.second, TermRuleKind::Tensor, subsystem(t.first), subsystem(t.second)};
        if (r.first_subsystem == r.second_subsystem) r.kind = TermRuleKind::Sequential;
        out.rules.push_back(r);
    }
    return out;
}

double evaluate_inequality_quantum(const CorrelationInequality& ineq, const DensityMatrix& rho, const Settings& settings,
                                   const TermAssignment& assignment) {
    auto setting = [&](const VariableId& v) -> const BlochVector& {
        auto it = settings.find(v);
        if (it == settings.end()) throw Error(ErrorCode::MissingSetting, "no setting for " + v.str());
        return it->second;
    };
    std::vector<bool> used(assignment.rules.size(), false);
    double total = 0.0;
    for (const auto& term : ineq.terms) {
        std::optional<std::size_t> match;
        for (std::size_t i = 0; i < assignment.rules.size(); ++i) {
            const auto& r = assignment.rules[i];
            const bool same = r.first == term.first && r.second == term.second;
            const bool swapped = r.first == term.second && r.second == term.first;
            if (!same && !swapped) continue;
            if (swapped && r.kind == TermRuleKind::Sequential) {
                throw Error(ErrorCode::InvalidAssignment, "sequential order of <" + term.first.str() +
                                                              term.second.str() + "> differs from the written order");
            }
            if (match || used[i]) {
                throw Error(ErrorCode::InvalidAssignment, "term <" + term.first.str() + term.second.str() +
                                                              "> is assigned more than once");
            }
            match = i;
        }
        if (!match) {
            throw Error(ErrorCode::MissingAssignment, "no rule for <" + term.first.str() + term.second.str() + ">");
        }
        used[*match] = true;
        const auto& r = assignment.rules[*match];
        double value = 0.0;
        if (r.kind == TermRuleKind::Sequential) {
            value = sequential_correlator(rho, r.first_subsystem, setting(r.first), setting(r.second));
        } else {
            if (r.first_subsystem == r.second_subsystem) {
                throw Error(ErrorCode::InvalidAssignment, "tensor rule needs two distinct subsystems");
            }
            const auto& a = r.first_subsystem == Subsystem::A ? setting(r.first) : setting(r.second);
            const auto& b = r.first_subsystem == Subsystem::A ? setting(r.second) : setting(r.first);
            value = spatial_correlator(rho, a, b);
        }
        total += static_cast<double>(term.coefficient) * value;
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) {
            throw Error(ErrorCode::InvalidAssignment, "rule for <" + assignment.rules[i].first.str() +
                                                          assignment.rules[i].second.str() + "> matches no term");
        }
    }
    return total;
}

ComplexMatrix correlation_operator(const CorrelationInequality& ineq, const Settings& settings,
                                   const TermAssignment& assignment) {
    auto setting = [&](const VariableId& v) -> const BlochVector& {
        auto it = settings.find(v);
        if (it == settings.end()) throw Error(ErrorCode::MissingSetting, "no setting for " + v.str());
        return it->second;
    };
    ComplexMatrix out(4);
    for (const auto& term : ineq.terms) {
        const TermRule* rule = nullptr;
        for (const auto& r : assignment.rules) {
            if ((r.first == term.first && r.second == term.second) ||
                (r.first == term.second && r.second == term.first)) {
                rule = &r;
            }
        }
        if (!rule) throw Error(ErrorCode::MissingAssignment, "no rule for <" + term.first.str() + term.second.str() + ">");
        const Complex c(static_cast<double>(term.coefficient));
        if (rule->kind == TermRuleKind::Sequential) {
            out = out + Complex(c * dot(setting(rule->first), setting(rule->second))) * ComplexMatrix::identity(4);
        } else {
            const auto& a = rule->first_subsystem == Subsystem::A ? setting(rule->first) : setting(rule->second);
            const auto& b = rule->first_subsystem == Subsystem::A ? setting(rule->second) : setting(rule->first);
            out = out + c * kron(pauli_observable(a), pauli_observable(b));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Settings HybridSettings::as_map() const {
    return {{VariableId('X', 1), x1}, {VariableId('X', 2), x2}, {VariableId('Y', 1), y1}, {VariableId('Y', 2), y2}};
}

double hybrid_f_product(const BlochVector& nA, const BlochVector& nB, const HybridSettings& s) {
    for (const auto* v : {&nA, &nB, &s.x1, &s.x2, &s.y1, &s.y2}) pauli_observable(*v);
    return dot(s.x1, s.x2) + dot(s.x1, nA) * dot(s.y2, nB) - dot(s.x2, nA) * dot(s.y1, nB) + dot(s.y1, s.y2);
}

FOperator build_f_operator(const HybridSettings& s) {
    FOperator out;
    out.s1 = Complex(dot(s.x1, s.x2) + dot(s.y1, s.y2)) * ComplexMatrix::identity(4);
    out.s2 = kron(pauli_observable(s.x1), pauli_observable(s.y2)) - kron(pauli_observable(s.x2), pauli_observable(s.y1));
    out.f = out.s1 + out.s2;
    return out;
}

ComplexMatrix s2_squared_closed_form(const HybridSettings& s) {
    const ComplexMatrix id = ComplexMatrix::identity(4);
    const ComplexMatrix inner = Complex(1.0 - dot(s.x1, s.x2) * dot(s.y1, s.y2)) * id -
                                kron(sigma_dot(cross(s.x1, s.x2)), sigma_dot(cross(s.y1, s.y2)));
    return Complex(2.0) * inner;
}

double tsirelson_envelope(double theta1, double theta2) noexcept {
    const double gap = std::max(0.0, 1.0 - std::cos(theta1 - theta2));
    return std::abs(std::cos(theta1) + std::cos(theta2) + std::sqrt(2.0) * std::sqrt(gap));
}

double operator_norm(const ComplexMatrix& m) {
    const auto eig = hermitian_eigenvalues(m, 1e-10);
    return std::max(std::abs(eig.front()), std::abs(eig.back()));
}

HybridSettings quarter_turn_ladder(LadderOrientation orientation) {
    const double q = std::acos(-1.0) / 4.0;
    HybridSettings s;
    s.x2 = BlochVector::coplanar(0.0);
    s.x1 = BlochVector::coplanar(q);
    s.y2 = BlochVector::coplanar(2.0 * q);
    s.y1 = BlochVector::coplanar(3.0 * q);
    if (orientation == LadderOrientation::Antipodal) {
        s.y2 = -s.y2;
        s.y1 = -s.y1;
    }
    return s;
}

}  // namespace rsineq
