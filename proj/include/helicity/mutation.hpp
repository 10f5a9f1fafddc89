#pragma once

// Deliberate defects for checking that the verification suite notices them.
// Off unless set; never set by simulation code.

#include <atomic>

namespace helicity::mutation {

enum class Defect { None, FluxSign, LieSign, CofactorTranspose };

inline std::atomic<Defect>& active_defect() {
  static std::atomic<Defect> d{Defect::None};
  return d;
}

inline bool active(Defect d) { return active_defect().load(std::memory_order_relaxed) == d; }

/// Sets a defect for the lifetime of the guard.
class Scope {
 public:
  explicit Scope(Defect d) : saved_(active_defect().exchange(d)) {}
  ~Scope() { active_defect().store(saved_); }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  Defect saved_;
};

}  // namespace helicity::mutation
