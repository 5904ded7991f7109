#pragma once

#include <stdexcept>
#include <string>

namespace incstab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SobolevBoundViolated : Error { using Error::Error; };
struct BadExponents : Error { using Error::Error; };
struct DegenerateFrequency : Error { using Error::Error; };
struct ImaginaryRootViolation : Error { using Error::Error; };
struct ScheduleInfeasible : Error { using Error::Error; };
struct SymbolSingularity : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct TraceNotVanishing : Error { using Error::Error; };
struct NearResonance : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct SpanDeficient : Error { using Error::Error; };
struct InadmissibleFrame : Error { using Error::Error; };
struct NonHermitian : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace incstab
