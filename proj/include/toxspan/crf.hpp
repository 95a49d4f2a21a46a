#pragma once

#include "toxspan/crf/features.hpp"
#include "toxspan/crf/inference.hpp"
#include "toxspan/crf/model.hpp"
#include "toxspan/crf/train.hpp"
