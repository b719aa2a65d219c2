#ifndef E2PA_E2PA_HPP
#define E2PA_E2PA_HPP

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"
#include "e2pa/types.hpp"
#include "e2pa/spectrum.hpp"
#include "e2pa/photon_stats.hpp"
#include "e2pa/optics.hpp"
#include "e2pa/jsi.hpp"
#include "e2pa/stats.hpp"
#include "e2pa/xsection.hpp"
#include "e2pa/sim.hpp"
#include "e2pa/io.hpp"
#include "e2pa/config.hpp"
#include "e2pa/report.hpp"
#include "e2pa/cli.hpp"

#endif
