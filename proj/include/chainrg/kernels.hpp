#pragma once

#include <complex>
#include <cstddef>

namespace chainrg::kernels {

enum class Isa { Scalar, Avx2 };

// Best instruction set the running CPU supports.
Isa detected_isa();
// Instruction set used by the dispatching entry points below.
Isa active_isa();
void set_isa(Isa isa);
const char* isa_name(Isa isa);

// Compensated sums over four interleaved lanes (element j goes to lane j mod 4),
// merged lane 0..3 with the same compensation. The scalar and AVX2 variants
// perform identical roundings, so their results agree bit for bit.
double dot_scalar(const double* a, const double* b, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// Sum of (ar + i ai)(br + i bi) over split real/imaginary arrays.
std::complex<double> cdot_scalar(const double* ar, const double* ai, const double* br,
                                 const double* bi, std::size_t n);
std::complex<double> cdot_avx2(const double* ar, const double* ai, const double* br,
                               const double* bi, std::size_t n);
std::complex<double> cdot(const double* ar, const double* ai, const double* br,
                          const double* bi, std::size_t n);

double sum(const double* a, std::size_t n);

}  // namespace chainrg::kernels
