#pragma once

#include "nctefa/centrality.hpp"
#include "nctefa/controllability.hpp"
#include "nctefa/dataset_io.hpp"
#include "nctefa/diagnostics.hpp"
#include "nctefa/encoding.hpp"
#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"
#include "nctefa/matrix_exp.hpp"
#include "nctefa/metric.hpp"
#include "nctefa/pipeline.hpp"
