#pragma once

// Dense double-precision inner loops shared by the similarity, vectorizer and
// SOM stages. Every backend implements the same KernelTable; the scalar table
// is the reference that the SIMD tables are tested against.
//
// Elementwise kernels (accumulate, move_toward) round identically on every
// backend. Reductions (dot, squared_distance) may differ in the last bits
// because lanes are summed in a different order.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace docsom::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // acc[k] += x[k]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
  // w[k] += rate * (x[k] - w[k])
  void (*move_toward)(double* w, const double* x, double rate, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(DOCSOM_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(DOCSOM_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

// Backends compiled in and supported by the running CPU, scalar first.
std::vector<Backend> available_backends();
const KernelTable& table_for(Backend backend);

// The table used by the span wrappers below. Defaults to the widest supported
// backend; DOCSOM_KERNELS=scalar|avx2|neon in the environment overrides it.
const KernelTable& active();
void select(Backend backend);
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend backend);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void accumulate(std::span<double> acc, std::span<const double> x);
void move_toward(std::span<double> w, std::span<const double> x, double rate);

}  // namespace docsom::kernels
