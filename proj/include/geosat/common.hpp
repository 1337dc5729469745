#ifndef GEOSAT_COMMON_HPP
#define GEOSAT_COMMON_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace geosat {

/// Raised on contract violations: bad parameters, malformed input files,
/// exceeded resource guards.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Metric { Linf, L2 };
enum class BoundaryMode { Cube, Torus };

inline std::string_view to_string(Metric m) { return m == Metric::Linf ? "linf" : "l2"; }
inline std::string_view to_string(BoundaryMode b) { return b == BoundaryMode::Cube ? "cube" : "torus"; }

inline Metric parse_metric(std::string_view s)
{
  if (s == "linf" || s == "Linf") return Metric::Linf;
  if (s == "l2" || s == "L2") return Metric::L2;
  throw Error("unknown metric: " + std::string(s));
}

inline BoundaryMode parse_boundary(std::string_view s)
{
  if (s == "cube") return BoundaryMode::Cube;
  if (s == "torus") return BoundaryMode::Torus;
  throw Error("unknown boundary mode: " + std::string(s));
}

} // namespace geosat

#endif // GEOSAT_COMMON_HPP
