#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "padiclab/precision.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

class UnramifiedElem;

/**
 * The unramified extension of degree f, modelled as Z_p[y]/(P) at a fixed
 * working precision, P a monic degree-f lift of an irreducible polynomial
 * over F_p. The polynomial is chosen deterministically: lowest coefficient
 * tuple (c_0, ..., c_{f-1}) in lexicographic order among the irreducible
 * candidates whose root generates the multiplicative group of the residue
 * field. Determinism matters more than the particular choice: two runs (or
 * two machines) must agree on what "the" degree-f field is.
 *
 * The arithmetic Frobenius is the ring automorphism sending y to the unique
 * root of P congruent to y^p mod p, found by Newton iteration; it is stored
 * as an f x f matrix over Z/p^prec, so applying it is a matrix-vector
 * product and its inverse is the (f-1)-th matrix power.
 */
class UnramifiedField : public std::enable_shared_from_this<UnramifiedField> {
  public:
    using Ptr = std::shared_ptr<const UnramifiedField>;

    // Deterministic construction (polynomial search described above).
    static Ptr make(std::uint64_t p, int prec, int degree);
    // Explicit seed polynomial: monic, length degree+1, coefficients mod p.
    // A reducible seed is rejected and the message names a witness factor.
    static Ptr make_with_poly(std::uint64_t p, int prec, std::vector<std::uint64_t> poly);

    std::uint64_t p() const { return p_; }
    int prec() const { return prec_; }
    int degree() const { return f_; }
    std::uint64_t modulus() const { return mod_; }
    const std::vector<std::uint64_t>& defining_poly() const { return poly_; }
    std::string poly_string() const;

    UnramifiedElem zero() const;
    UnramifiedElem one() const;
    UnramifiedElem gen() const;  // the class of y
    UnramifiedElem from_scalar(const PadicScalar& c) const;
    UnramifiedElem from_int(long long v) const;
    UnramifiedElem element(std::vector<PadicScalar> coords) const;

    // Residue-field element number k in the fixed enumeration order
    // (base-p digits of k, least significant digit = coefficient of y^0).
    UnramifiedElem residue_rep(std::uint64_t k) const;

    const std::vector<std::vector<std::uint64_t>>& frob_matrix() const { return frob_; }
    const std::vector<std::vector<std::uint64_t>>& frob_inv_matrix() const { return frob_inv_; }

  private:
    std::uint64_t p_;
    int prec_;
    int f_;
    std::uint64_t mod_;  // p^prec
    std::vector<std::uint64_t> poly_;  // monic, size f+1
    std::vector<std::vector<std::uint64_t>> frob_;      // column j = coords of sigma(y)^j
    std::vector<std::vector<std::uint64_t>> frob_inv_;  // sigma^(f-1)

    UnramifiedField() = default;
    void build_frobenius();
    friend class UnramifiedElem;
};

/**
 * Element of an UnramifiedField: a coordinate vector in the power basis
 * 1, y, ..., y^(f-1). Coordinates are PadicScalar values sharing the field's
 * prime; integral elements keep den_exp() == 0 throughout, and the lossy
 * bookkeeping of the scalar type carries over coordinatewise.
 */
class UnramifiedElem {
  public:
    UnramifiedElem() = default;
    UnramifiedElem(UnramifiedField::Ptr K, std::vector<PadicScalar> c);

    const UnramifiedField::Ptr& field() const { return K_; }
    const std::vector<PadicScalar>& coords() const { return c_; }
    const PadicScalar& coord(int i) const { return c_[static_cast<std::size_t>(i)]; }

    bool is_zero() const;
    bool is_scalar() const;  // coordinates 1..f-1 all zero
    PadicScalar as_scalar() const;

    UnramifiedElem operator+(const UnramifiedElem& o) const;
    UnramifiedElem operator-(const UnramifiedElem& o) const;
    UnramifiedElem operator*(const UnramifiedElem& o) const;
    UnramifiedElem operator-() const;
    UnramifiedElem& operator+=(const UnramifiedElem& o) { return *this = *this + o; }
    UnramifiedElem& operator-=(const UnramifiedElem& o) { return *this = *this - o; }
    UnramifiedElem& operator*=(const UnramifiedElem& o) { return *this = *this * o; }

    UnramifiedElem scale(const PadicScalar& c) const;
    UnramifiedElem mul_int(long long v) const;
    UnramifiedElem div_p_pow(int k) const;
    UnramifiedElem mul_p_pow(int k) const;

    // Inverse of a unit (unit = reduction mod p is nonzero), by Newton
    // lifting from the residue-field inverse. Throws on non-units.
    UnramifiedElem inv() const;
    UnramifiedElem pow(std::uint64_t e) const;

    UnramifiedElem frobenius() const;
    UnramifiedElem frobenius_inv() const;
    UnramifiedElem frobenius_pow(int k) const;  // k may be negative

    // Trace down to Z_p: sum of all Frobenius conjugates; the off-scalar
    // coordinates cancel exactly and the scalar part is returned.
    PadicScalar trace_to_base() const;

    // Multiplicative (Teichmuller) representative of the residue class,
    // the fixed point of x -> x^(p^f) over it.
    UnramifiedElem teichmuller() const;

    bool same_value(const UnramifiedElem& o) const;
    // Minimum agreement (in digits) across coordinates.
    static int agree_digits(const UnramifiedElem& a, const UnramifiedElem& b);

    // Valuation lower bound: min over coordinates.
    int min_valuation() const;

    std::string to_string() const;

  private:
    UnramifiedField::Ptr K_;
    std::vector<PadicScalar> c_;

    void require_same_field(const UnramifiedElem& o) const;
};

/**
 * A fixed embedding of one unramified field into a larger one (degrees
 * dividing), determined by the deterministically chosen root of the small
 * field's defining polynomial in the big one. Carries a section so that
 * elements of the image can be pulled back exactly, and hence supports the
 * trace down to the subfield.
 */
class UnramifiedEmbedding {
  public:
    UnramifiedEmbedding(UnramifiedField::Ptr sub, UnramifiedField::Ptr sup);

    const UnramifiedField::Ptr& sub() const { return sub_; }
    const UnramifiedField::Ptr& sup() const { return sup_; }
    int relative_degree() const { return m_; }

    UnramifiedElem embed(const UnramifiedElem& x) const;
    // Pull an element of the image back to the subfield; throws if x is not
    // in the image at working precision.
    UnramifiedElem restrict(const UnramifiedElem& x) const;
    bool in_image(const UnramifiedElem& x) const;

    // Relative trace: sum over Gal(sup/sub) = <frobenius^[sub:Q_p]>,
    // returned as an element of the subfield.
    UnramifiedElem trace(const UnramifiedElem& x) const;

  private:
    UnramifiedField::Ptr sub_, sup_;
    int m_;  // relative degree
    std::vector<std::vector<std::uint64_t>> embed_cols_;  // coords of yhat^j
    std::vector<int> pivot_rows_;
    std::vector<std::vector<std::uint64_t>> section_;  // inverse of pivot submatrix
};

// Generic-ring hooks (used by the series templates).
inline UnramifiedElem zero_like(const UnramifiedElem& x) { return x.field()->zero(); }
inline UnramifiedElem one_like(const UnramifiedElem& x) { return x.field()->one(); }
inline UnramifiedElem frobenius(const UnramifiedElem& x) { return x.frobenius(); }
inline UnramifiedElem frobenius_inv(const UnramifiedElem& x) { return x.frobenius_inv(); }
inline bool is_zero(const UnramifiedElem& x) { return x.is_zero(); }
inline UnramifiedElem mul_int(const UnramifiedElem& x, long long v) { return x.mul_int(v); }
inline UnramifiedElem div_p_pow(const UnramifiedElem& x, int k) { return x.div_p_pow(k); }
inline bool same_value(const UnramifiedElem& a, const UnramifiedElem& b) { return a.same_value(b); }
inline int min_valuation(const UnramifiedElem& x) { return x.min_valuation(); }
inline UnramifiedElem cap_abs_prec(const UnramifiedElem& x, int a) {
    std::vector<PadicScalar> c(x.coords());
    for (auto& v : c)
        v = cap_abs_prec(v, a);
    return x.field()->element(std::move(c));
}

}  // namespace padiclab
