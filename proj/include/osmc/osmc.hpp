#pragma once

#include "osmc/analysis.hpp"
#include "osmc/bisectors.hpp"
#include "osmc/distances.hpp"
#include "osmc/encoding.hpp"
#include "osmc/error.hpp"
#include "osmc/fingerprint.hpp"
#include "osmc/generators.hpp"
#include "osmc/instance.hpp"
#include "osmc/osg_io.hpp"
#include "osmc/pattern_tree.hpp"
#include "osmc/persistent_index.hpp"
#include "osmc/planar_graph.hpp"
#include "osmc/serialize.hpp"
#include "osmc/shattering.hpp"
