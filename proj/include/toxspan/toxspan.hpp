#pragma once

#include "toxspan/corpus.hpp"
#include "toxspan/crf.hpp"
#include "toxspan/eval.hpp"
#include "toxspan/lexicon.hpp"
#include "toxspan/spans.hpp"
#include "toxspan/tagger.hpp"
#include "toxspan/tokenize.hpp"
