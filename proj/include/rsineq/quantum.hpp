#pragma once

// Exact qubit evaluation: Bloch-vector observables, one- and two-qubit states,
// spatial (tensor) and sequential (Lueders) correlators, and the hybrid F operator.

#include "rsineq/linalg.hpp"
#include "rsineq/polynomial.hpp"

#include <array>
#include <map>
#include <vector>

namespace rsineq {

inline constexpr double kUnitTolerance = 1e-12;

class BlochVector {
public:
    /// Throws NonUnitVector unless |(x, y, z)| = 1 within kUnitTolerance.
    static BlochVector make(double x, double y, double z);
    /// Unit vector at `angle` from +z towards +x in the x-z plane.
    static BlochVector coplanar(double angle);
    static BlochVector spherical(double polar, double azimuth);

    [[nodiscard]] const std::array<double, 3>& components() const noexcept { return v_; }
    [[nodiscard]] double x() const noexcept { return v_[0]; }
    [[nodiscard]] double y() const noexcept { return v_[1]; }
    [[nodiscard]] double z() const noexcept { return v_[2]; }
    [[nodiscard]] BlochVector operator-() const noexcept;

private:
    explicit BlochVector(std::array<double, 3> v) : v_(v) {}
    std::array<double, 3> v_{0.0, 0.0, 1.0};
};

double dot(const BlochVector& a, const BlochVector& b) noexcept;
std::array<double, 3> cross(const BlochVector& a, const BlochVector& b) noexcept;

/// v . sigma for an arbitrary real vector.
ComplexMatrix sigma_dot(const std::array<double, 3>& v);
/// n . sigma for a unit direction: Hermitian, involutory, traceless.
ComplexMatrix pauli_observable(const BlochVector& direction);

enum class Subsystem { A, B };

class DensityMatrix {
public:
    /// Dimension 2 or 4; Hermitian and unit trace within 1e-12; eigenvalues >= -1e-10. Throws InvalidState.
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix singlet();
    static DensityMatrix qubit(const BlochVector& n);
    static DensityMatrix product(const BlochVector& nA, const BlochVector& nB);
    static DensityMatrix maximally_mixed(std::size_t dim);
    static DensityMatrix from_pure(const std::vector<Complex>& psi);

    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }

private:
    ComplexMatrix m_;
};

/// Lifts a one-qubit operator onto `subsystem` of a state of dimension `dim` (2 or 4).
ComplexMatrix embed(const ComplexMatrix& op, Subsystem subsystem, std::size_t dim);

/// Projector onto the `outcome` (+1/-1) eigenspace of direction . sigma.
ComplexMatrix projector(const BlochVector& direction, int outcome);

/// Tr(rho (a.sigma (x) b.sigma)); rho must be two-qubit.
double spatial_correlator(const DensityMatrix& rho, const BlochVector& a, const BlochVector& b);

/// sum_{a,b} a b Tr(Pi_b Pi_a rho Pi_a): `first` then `second` on one subsystem, Lueders update between.
double sequential_correlator(const DensityMatrix& rho, Subsystem subsystem, const BlochVector& first,
                             const BlochVector& second);

enum class TermRuleKind { Tensor, Sequential };

/// Tensor: `first` measured on `first_subsystem`, `second` on `second_subsystem`.
/// Sequential: both on `first_subsystem`, `first` strictly before `second`.
struct TermRule {
    VariableId first;
    VariableId second;
    TermRuleKind kind = TermRuleKind::Tensor;
    Subsystem first_subsystem = Subsystem::A;
    Subsystem second_subsystem = Subsystem::B;
};

struct TermAssignment {
    std::vector<TermRule> rules;
};

/// Cross-party terms become tensor rules, same-party terms sequential rules in written order.
/// The lexicographically first party maps to subsystem A, the second to B.
TermAssignment assign_terms(const CorrelationInequality& ineq, const ScenarioSpec& scenario);

using Settings = std::map<VariableId, BlochVector>;

double evaluate_inequality_quantum(const CorrelationInequality& ineq, const DensityMatrix& rho, const Settings& settings,
                                   const TermAssignment& assignment);

/// Operator whose expectation in any two-qubit state equals evaluate_inequality_quantum:
/// tensor terms contribute c (a.sigma)(x)(b.sigma), sequential terms c (a.b) I.
ComplexMatrix correlation_operator(const CorrelationInequality& ineq, const Settings& settings,
                                   const TermAssignment& assignment);

struct HybridSettings {
    BlochVector x1 = BlochVector::coplanar(0.0);
    BlochVector x2 = BlochVector::coplanar(0.0);
    BlochVector y1 = BlochVector::coplanar(0.0);
    BlochVector y2 = BlochVector::coplanar(0.0);

    [[nodiscard]] Settings as_map() const;
};

/// x1.x2 + (x1.nA)(y2.nB) - (x2.nA)(y1.nB) + y1.y2
double hybrid_f_product(const BlochVector& nA, const BlochVector& nB, const HybridSettings& s);

struct FOperator {
    ComplexMatrix f;
    ComplexMatrix s1;  // (x1.x2 + y1.y2) I
    ComplexMatrix s2;  // (x1.sigma)(x)(y2.sigma) - (x2.sigma)(x)(y1.sigma)
};

FOperator build_f_operator(const HybridSettings& s);

/// 2[I - (x1.x2)(y1.y2) I - ((x1 x x2).sigma)(x)((y1 x y2).sigma)]
ComplexMatrix s2_squared_closed_form(const HybridSettings& s);

/// |cos t1 + cos t2 + sqrt2 sqrt(1 - cos(t1 - t2))|
double tsirelson_envelope(double theta1, double theta2) noexcept;

/// Largest |eigenvalue|. Throws NotHermitian beyond 1e-10.
double operator_norm(const ComplexMatrix& m);

/// x2, x1, y2, y1 at successive pi/4 steps in the x-z plane. Antipodal flips both Y
/// directions, the orientation that reaches 2 sqrt2 on the singlet.
enum class LadderOrientation { Aligned, Antipodal };
HybridSettings quarter_turn_ladder(LadderOrientation orientation);

}  // namespace rsineq
