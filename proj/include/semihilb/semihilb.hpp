#pragma once

#include "semihilb/blockops.hpp"
#include "semihilb/bounds.hpp"
#include "semihilb/campaign.hpp"
#include "semihilb/core.hpp"
#include "semihilb/dense.hpp"
#include "semihilb/errors.hpp"
#include "semihilb/generators.hpp"
#include "semihilb/io.hpp"
#include "semihilb/radii.hpp"
#include "semihilb/selftest.hpp"
#include "semihilb/theta_search.hpp"
#include "semihilb/tolerance.hpp"
