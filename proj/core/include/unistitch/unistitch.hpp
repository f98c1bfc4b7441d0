#pragma once

#include "unistitch/backend.hpp"
#include "unistitch/config.hpp"
#include "unistitch/error.hpp"
#include "unistitch/geometry.hpp"
#include "unistitch/homography.hpp"
#include "unistitch/image.hpp"
#include "unistitch/io.hpp"
#include "unistitch/manifest.hpp"
#include "unistitch/maskgen.hpp"
#include "unistitch/metrics.hpp"
#include "unistitch/morphology.hpp"
#include "unistitch/pipeline.hpp"
#include "unistitch/remote_backend.hpp"
