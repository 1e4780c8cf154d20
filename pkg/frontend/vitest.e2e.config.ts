import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests-e2e/**/*.test.ts"],
    testTimeout: 180_000,
    hookTimeout: 180_000,
    // the live server is a shared resource; keep tests sequential
    fileParallelism: false,
  },
});
