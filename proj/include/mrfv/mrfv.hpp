#pragma once

#include "mrfv/butcher.hpp"
#include "mrfv/config.hpp"
#include "mrfv/core.hpp"
#include "mrfv/csr.hpp"
#include "mrfv/discretization.hpp"
#include "mrfv/geometry.hpp"
#include "mrfv/gmres.hpp"
#include "mrfv/ilut.hpp"
#include "mrfv/io.hpp"
#include "mrfv/irk.hpp"
#include "mrfv/jacobian.hpp"
#include "mrfv/model.hpp"
#include "mrfv/multiresolution.hpp"
#include "mrfv/newton.hpp"
#include "mrfv/runner.hpp"
#include "mrfv/stage_matrix.hpp"
#include "mrfv/step_control.hpp"
#include "mrfv/study.hpp"
#include "mrfv/tree.hpp"
