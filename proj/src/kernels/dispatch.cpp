#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "docsom/kernels.hpp"

namespace docsom::kernels {
namespace {

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(DOCSOM_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(DOCSOM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("DOCSOM_KERNELS"); env != nullptr && *env != '\0') {
    const Backend requested = parse_backend(env);
    if (!cpu_supports(requested)) {
      throw std::runtime_error(std::string("DOCSOM_KERNELS=") + env +
                               " is not supported on this CPU");
    }
    return &table_for(requested);
  }
  return &table_for(available_backends().back());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("kernel operands differ in length: " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
}

}  // namespace

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::kScalar};
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table_for(Backend backend) {
  if (!cpu_supports(backend)) {
    throw std::runtime_error("kernel backend '" + std::string(backend_name(backend)) +
                             "' is unavailable");
  }
  switch (backend) {
#if defined(DOCSOM_HAVE_AVX2)
    case Backend::kAvx2:
      return avx2::table();
#endif
#if defined(DOCSOM_HAVE_NEON)
    case Backend::kNeon:
      return neon::table();
#endif
    default:
      return scalar::table();
  }
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Backend backend) { current().store(&table_for(backend), std::memory_order_relaxed); }

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  throw std::invalid_argument("unknown kernel backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  check_sizes(acc.size(), x.size());
  active().accumulate(acc.data(), x.data(), acc.size());
}

void move_toward(std::span<double> w, std::span<const double> x, double rate) {
  check_sizes(w.size(), x.size());
  active().move_toward(w.data(), x.data(), rate, w.size());
}

}  // namespace docsom::kernels
