#ifndef GEOSAT_GEOSAT_HPP
#define GEOSAT_GEOSAT_HPP

#include <geosat/analytics.hpp>
#include <geosat/common.hpp>
#include <geosat/experiments.hpp>
#include <geosat/geometry.hpp>
#include <geosat/models.hpp>
#include <geosat/rng.hpp>
#include <geosat/solvers.hpp>

#endif // GEOSAT_GEOSAT_HPP
