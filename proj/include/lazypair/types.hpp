// Core value types shared by the heap, the workload runner and the auditor.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lazypair {

/// Ordering key. Equal keys are allowed.
using Key = std::int64_t;

inline constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();

/// Reference to a node in a Universe arena. A handle is valid only while the
/// slot generation matches; deleting the node bumps the generation.
struct NodeHandle {
  std::uint32_t index = kNil;
  std::uint32_t generation = 0;

  friend bool operator==(const NodeHandle&, const NodeHandle&) = default;
};

/// Opaque heap identifier. Ids consumed by a meld keep resolving to the
/// melded heap.
struct HeapId {
  std::uint32_t raw = kNil;

  friend bool operator==(const HeapId&, const HeapId&) = default;
};

/// How a node's link to its current parent was created.
enum class LinkOrigin : std::uint8_t {
  None,
  InsertLink,
  MeldLink,
  PairingLink,
  CleanupLink,
};

std::string_view to_string(LinkOrigin origin);

enum class Mode : std::uint8_t { Lazy, Eager };

/// Policy knobs for the heap. Eager mode is the standard pairing heap with
/// cut-and-link decrease-key; the remaining flags only apply to Lazy mode.
struct VariantConfig {
  Mode mode = Mode::Lazy;
  bool cleanup_on_meld = true;
  bool periodic_cleanup = false;
  double periodic_factor = 1.0;
  bool direct_relink = false;
  double direct_relink_fraction = 0.5;

  /// Copy with the lazy-only flags cleared when mode is Eager. Throws
  /// std::invalid_argument on a non-positive factor or a fraction outside (0,1].
  VariantConfig normalized() const;

  static VariantConfig lazy() { return {}; }
  static VariantConfig eager() {
    VariantConfig c;
    c.mode = Mode::Eager;
    c.cleanup_on_meld = false;
    return c;
  }
};

enum class ErrorKind : std::uint8_t {
  InvalidHandle,
  EmptyHeap,
  KeyIncrease,
  NotInHeap,
  UnknownHeap,
  SelfMeld,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class HeapError : public std::runtime_error {
 public:
  HeapError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lazypair
