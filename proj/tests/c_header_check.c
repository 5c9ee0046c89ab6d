/* Copyright 2026 The lftree Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* The public header compiles as C and the library links from C. */

#include <stdio.h>

#include "lftree/lftree.h"

int main(void) {
  lftree_pool* pool = NULL;
  if (lftree_pool_make_levy(1, 20, 0, -10.0, 10.0, &pool) != LFTREE_OK) {
    fprintf(stderr, "%s\n", lftree_last_error());
    return 1;
  }
  const int ok = lftree_pool_size(pool) == 20 && lftree_pool_dim(pool) == 1;
  lftree_pool_free(pool);
  printf("lftree %s\n", lftree_version());
  return ok ? 0 : 1;
}
