#pragma once

/*
 * ADL trampolines for the generic-ring hooks (zero_like, frobenius, ...).
 * The ring templates (cyclotomic extensions, truncated series) call these
 * instead of the hooks directly: an unqualified call from a distinctly-named
 * wrapper is resolved against the instantiation context, so a coefficient
 * ring only has to declare its hooks in namespace padiclab before the
 * template is instantiated, not before this header is parsed.
 */

namespace padiclab::ringops {

template <typename R>
R make_zero(const R& x) {
    return zero_like(x);
}
template <typename R>
R make_one(const R& x) {
    return one_like(x);
}
template <typename R>
R frob(const R& x) {
    return frobenius(x);
}
template <typename R>
R frob_inv(const R& x) {
    return frobenius_inv(x);
}
template <typename R>
bool vanishes(const R& x) {
    return is_zero(x);
}
template <typename R>
R times_int(const R& x, long long v) {
    return mul_int(x, v);
}
template <typename R>
R shift_down(const R& x, int k) {
    return div_p_pow(x, k);
}
template <typename R>
bool agree(const R& a, const R& b) {
    return same_value(a, b);
}
template <typename R>
int val_floor(const R& x) {
    return min_valuation(x);
}
template <typename R>
R clamp_abs(const R& x, int a) {
    return cap_abs_prec(x, a);
}

}  // namespace padiclab::ringops
