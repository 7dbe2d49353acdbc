import { buildFixtureLibrary } from "../src/build";

export default function setup(): void {
  buildFixtureLibrary(true);
}
