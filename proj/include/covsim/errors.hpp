#pragma once

#include <stdexcept>
#include <string>

namespace covsim {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally invalid input: bad polygon, agent count < 2, bad parameter box.
struct InvalidConfig : Error {
  using Error::Error;
};

/// Two agent positions closer than the geometric tolerance.
struct CoincidentAgents : Error {
  using Error::Error;
};

/// An agent position lies outside the workspace polygon.
struct PositionOutsideWorkspace : Error {
  using Error::Error;
};

/// Integration was requested over an empty region.
struct EmptyRegion : Error {
  using Error::Error;
};

/// A flow step longer than the smallest remaining timer.
struct FlowOvershoot : Error {
  using Error::Error;
};

/// Jump requested while no timer has expired.
struct NotInJumpSet : Error {
  using Error::Error;
};

/// The simulation loop aborted; the message carries the hybrid time of the failure.
struct EngineAbort : Error {
  using Error::Error;
};

/// Config file is not syntactically valid JSON.
struct ParseError : Error {
  using Error::Error;
};

/// Config parsed but violates at least one documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// Preset name not in the built-in catalog.
struct UnknownPreset : Error {
  using Error::Error;
};

}  // namespace covsim
