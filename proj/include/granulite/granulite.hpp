#pragma once

#include "granulite/error.hpp"
#include "granulite/geometry/adjacency.hpp"
#include "granulite/geometry/face_ops.hpp"
#include "granulite/geometry/primitives.hpp"
#include "granulite/geometry/types.hpp"
#include "granulite/geometry/validate.hpp"
#include "granulite/io/obj.hpp"
#include "granulite/io/ply.hpp"
#include "granulite/morpho/gradation.hpp"
#include "granulite/morpho/metrics.hpp"
#include "granulite/recon/reconstruct.hpp"
#include "granulite/seg/labels_io.hpp"
#include "granulite/seg/segment.hpp"
#include "granulite/sfm/bundle_adjust.hpp"
#include "granulite/sfm/scene_io.hpp"
#include "granulite/sfm/synth_scene.hpp"
#include "granulite/synth/fixtures.hpp"
