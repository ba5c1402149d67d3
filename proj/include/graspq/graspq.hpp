#pragma once

#include "graspq/bvh.hpp"
#include "graspq/config.hpp"
#include "graspq/contact.hpp"
#include "graspq/detector.hpp"
#include "graspq/error.hpp"
#include "graspq/evaluation.hpp"
#include "graspq/geometry.hpp"
#include "graspq/hand.hpp"
#include "graspq/hull.hpp"
#include "graspq/interchange.hpp"
#include "graspq/wrench.hpp"
