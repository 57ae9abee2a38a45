#pragma once
// Data-parallel inner loops used by assembly, time stepping and diagnostics.
//
// Every kernel has a portable scalar reference in kernels::scalar and, on
// x86-64, an AVX2+FMA variant in kernels::avx2. The table returned by
// kernels::active() is chosen once per process from the CPU feature bits;
// setting BEAMSTAB_KERNELS=scalar in the environment forces the reference
// path.

#include <cstddef>
#include <span>
#include <string_view>

namespace beamstab::kernels {

/// Lower-band view of a symmetric band matrix. diag(d)[i] holds A(i + d, i)
/// for d = 0..kd; entries past the end of a diagonal are never read.
struct SymBandView {
  std::size_t n = 0;
  std::size_t kd = 0;
  const double* data = nullptr;  // (kd + 1) contiguous diagonals of length n

  const double* diag(std::size_t d) const { return data + d * n; }
};

struct KernelTable {
  std::string_view name;
  double (*dot)(std::span<const double> x, std::span<const double> y);
  // sum_i w_i * f_i * g_i
  double (*wdot)(std::span<const double> w, std::span<const double> f,
                 std::span<const double> g);
  void (*axpy)(double a, std::span<const double> x, std::span<double> y);
  // y = A x
  void (*band_symv)(const SymBandView& a, std::span<const double> x, std::span<double> y);
  // Exact integral of (u'')^2 for a C^1 piecewise cubic given nodal values w,
  // nodal slopes t (length N + 1) and element lengths h (length N).
  double (*hermite_bending)(std::span<const double> h, std::span<const double> w,
                            std::span<const double> t);
};

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
double wdot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
void axpy(double a, std::span<const double> x, std::span<double> y);
void band_symv(const SymBandView& a, std::span<const double> x, std::span<double> y);
double hermite_bending(std::span<const double> h, std::span<const double> w,
                       std::span<const double> t);
const KernelTable& table();
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BEAMSTAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
double wdot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
void axpy(double a, std::span<const double> x, std::span<double> y);
void band_symv(const SymBandView& a, std::span<const double> x, std::span<double> y);
double hermite_bending(std::span<const double> h, std::span<const double> w,
                       std::span<const double> t);
const KernelTable& table();
}  // namespace avx2
#endif

/// True when the running CPU can execute the AVX2 table.
bool avx2_supported();

/// The dispatch table in use for this process.
const KernelTable& active();

}  // namespace beamstab::kernels
