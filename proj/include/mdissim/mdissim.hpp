#pragma once

#include "mdissim/dissim.hpp"
#include "mdissim/dissim_tensor.hpp"
#include "mdissim/distance_matrix.hpp"
#include "mdissim/json_io.hpp"
#include "mdissim/newick.hpp"
#include "mdissim/puiseux.hpp"
#include "mdissim/rational.hpp"
#include "mdissim/subsets.hpp"
#include "mdissim/trees.hpp"
#include "mdissim/tropical.hpp"
#include "mdissim/verdict.hpp"
#include "mdissim/weighted_tree.hpp"
