#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qkdlab/qstate.hpp"

namespace qkdlab {

enum class SessionEventKind : std::uint8_t {
  particle_delivered,
  delivery_acknowledged,
  bases_announced,
  test_positions_announced,
  verdict_announced,
};

struct SessionEvent {
  SessionEventKind kind;
  std::uint32_t index;  // particle index for deliveries, otherwise 0

  bool operator==(const SessionEvent&) const = default;
};

/// Authenticated public board shared by Alice, Bob and the eavesdropper.
///
/// Enforces the announcement ordering: nothing about the measurement bases
/// exists on the board until Bob has acknowledged receipt of every particle,
/// and readers asking earlier get a ProtocolOrderError.
class PublicChannel {
 public:
  explicit PublicChannel(std::size_t expected_particles) : expected_(expected_particles) {}

  void deliver(std::size_t index);
  /// Requires every expected particle to have been delivered.
  void acknowledge();
  void announce_bases(std::vector<MeasurementAxis> alice, std::vector<MeasurementAxis> bob);
  void announce_test_positions(std::vector<std::size_t> positions);
  void announce_verdict();

  bool acknowledged() const noexcept { return acknowledged_; }
  bool bases_announced() const noexcept { return bases_announced_; }
  std::size_t delivered() const noexcept { return delivered_; }

  const std::vector<MeasurementAxis>& alice_axes() const;
  const std::vector<MeasurementAxis>& bob_axes() const;
  const std::vector<std::size_t>& test_positions() const;

  std::span<const SessionEvent> trace() const noexcept { return trace_; }

 private:
  std::size_t expected_;
  std::size_t delivered_ = 0;
  bool acknowledged_ = false;
  bool bases_announced_ = false;
  bool test_announced_ = false;
  std::vector<MeasurementAxis> alice_axes_;
  std::vector<MeasurementAxis> bob_axes_;
  std::vector<std::size_t> test_positions_;
  std::vector<SessionEvent> trace_;
};

}  // namespace qkdlab
