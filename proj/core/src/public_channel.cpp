#include "qkdlab/public_channel.hpp"

#include "qkdlab/errors.hpp"

namespace qkdlab {

void PublicChannel::deliver(std::size_t index) {
  if (acknowledged_) throw ProtocolOrderError("particle delivered after acknowledgment");
  if (index != delivered_) throw ProtocolOrderError("particles must be delivered in order");
  ++delivered_;
  trace_.push_back({SessionEventKind::particle_delivered, static_cast<std::uint32_t>(index)});
}

void PublicChannel::acknowledge() {
  if (acknowledged_) throw ProtocolOrderError("delivery already acknowledged");
  if (delivered_ != expected_)
    throw ProtocolOrderError("acknowledgment before every particle was delivered");
  acknowledged_ = true;
  trace_.push_back({SessionEventKind::delivery_acknowledged, 0});
}

void PublicChannel::announce_bases(std::vector<MeasurementAxis> alice, std::vector<MeasurementAxis> bob) {
  if (!acknowledged_) throw ProtocolOrderError("bases announced before delivery acknowledgment");
  if (bases_announced_) throw ProtocolOrderError("bases already announced");
  alice_axes_ = std::move(alice);
  bob_axes_ = std::move(bob);
  bases_announced_ = true;
  trace_.push_back({SessionEventKind::bases_announced, 0});
}

void PublicChannel::announce_test_positions(std::vector<std::size_t> positions) {
  if (!bases_announced_) throw ProtocolOrderError("test positions announced before bases");
  test_positions_ = std::move(positions);
  test_announced_ = true;
  trace_.push_back({SessionEventKind::test_positions_announced, 0});
}

void PublicChannel::announce_verdict() {
  if (!test_announced_) throw ProtocolOrderError("verdict announced before the test sample");
  trace_.push_back({SessionEventKind::verdict_announced, 0});
}

const std::vector<MeasurementAxis>& PublicChannel::alice_axes() const {
  if (!bases_announced_) throw ProtocolOrderError("Alice's axes are not public yet");
  return alice_axes_;
}

const std::vector<MeasurementAxis>& PublicChannel::bob_axes() const {
  if (!bases_announced_) throw ProtocolOrderError("Bob's axes are not public yet");
  return bob_axes_;
}

const std::vector<std::size_t>& PublicChannel::test_positions() const {
  if (!test_announced_) throw ProtocolOrderError("test positions are not public yet");
  return test_positions_;
}

}  // namespace qkdlab
