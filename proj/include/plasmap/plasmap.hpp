// Umbrella header.
#pragma once

#include "plasmap/action.hpp"
#include "plasmap/bracket.hpp"
#include "plasmap/config.hpp"
#include "plasmap/core.hpp"
#include "plasmap/dispersion.hpp"
#include "plasmap/em.hpp"
#include "plasmap/fft.hpp"
#include "plasmap/field.hpp"
#include "plasmap/forms.hpp"
#include "plasmap/grid.hpp"
#include "plasmap/hybrid.hpp"
#include "plasmap/interp.hpp"
#include "plasmap/io.hpp"
#include "plasmap/lie.hpp"
#include "plasmap/maps.hpp"
#include "plasmap/moments.hpp"
#include "plasmap/rotational.hpp"
#include "plasmap/scenario.hpp"
#include "plasmap/sim.hpp"
