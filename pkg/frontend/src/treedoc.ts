/** Parser for the TREEDOC,1 pruned-elimination-tree document. */

export const TREEDOC_VERSION = "TREEDOC,1";

export class TreedocError extends Error {}

export interface TreeNode {
  candidate: number;
  annotation: string; // "pruned=<idx>" | "expanded" | "unpruned"
  children: TreeNode[];
}

export interface TreedocAssertion {
  index: number;
  status: string;
  token: string;
  explanation?: string;
}

export interface Treedoc {
  contest: string;
  winner: number;
  candidates: Map<number, string>;
  assertions: TreedocAssertion[];
  trees: { altWinner: number; root: TreeNode }[];
}

function splitN(line: string, parts: number): string[] {
  const out: string[] = [];
  let rest = line;
  for (let i = 0; i < parts - 1; i++) {
    const at = rest.indexOf(",");
    if (at < 0) throw new TreedocError(`malformed record: ${line}`);
    out.push(rest.slice(0, at));
    rest = rest.slice(at + 1);
  }
  out.push(rest);
  return out;
}

/** Rebuild nesting from (depth, node) preorder rows. */
function buildTree(rows: { depth: number; node: TreeNode }[]): TreeNode {
  const first = rows[0];
  if (!first || first.depth !== 0) {
    throw new TreedocError("tree block must start at depth 0");
  }
  const stack: TreeNode[] = [first.node];
  for (const { depth, node } of rows.slice(1)) {
    if (depth < 1 || depth > stack.length) {
      throw new TreedocError(`inconsistent node depth ${depth}`);
    }
    stack.length = depth;
    const parent = stack[depth - 1];
    if (!parent) throw new TreedocError(`orphan node at depth ${depth}`);
    parent.children.push(node);
    stack.push(node);
  }
  return first.node;
}

export function parseTreedoc(text: string): Treedoc {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines[0] !== TREEDOC_VERSION) {
    throw new TreedocError(
      `unsupported tree document version: ${lines[0] ?? "(empty)"}`,
    );
  }
  const doc: Treedoc = {
    contest: "",
    winner: -1,
    candidates: new Map(),
    assertions: [],
    trees: [],
  };
  let pendingRows: { depth: number; node: TreeNode }[] = [];
  let pendingAlt: number | null = null;

  const flush = () => {
    if (pendingAlt !== null) {
      doc.trees.push({ altWinner: pendingAlt, root: buildTree(pendingRows) });
      pendingRows = [];
      pendingAlt = null;
    }
  };

  for (const line of lines.slice(1)) {
    const key = line.slice(0, line.indexOf(","));
    switch (key) {
      case "CONTEST":
        doc.contest = splitN(line, 2)[1]!;
        break;
      case "WINNER":
        doc.winner = Number(splitN(line, 2)[1]);
        break;
      case "CANDIDATE": {
        const [, id, name] = splitN(line, 3);
        doc.candidates.set(Number(id), name!);
        break;
      }
      case "ASSERTION": {
        const [, index, status, token] = splitN(line, 4);
        doc.assertions.push({ index: Number(index), status: status!, token: token! });
        break;
      }
      case "EXPLAIN": {
        const [, index, explanation] = splitN(line, 3);
        const target = doc.assertions[Number(index)];
        if (target) target.explanation = explanation;
        break;
      }
      case "TREE":
        flush();
        pendingAlt = Number(splitN(line, 2)[1]);
        break;
      case "NODE": {
        if (pendingAlt === null) throw new TreedocError("NODE before any TREE");
        const [, depth, candidate, annotation] = splitN(line, 4);
        pendingRows.push({
          depth: Number(depth),
          node: { candidate: Number(candidate), annotation: annotation!, children: [] },
        });
        break;
      }
      default:
        throw new TreedocError(`unknown record type: ${key}`);
    }
  }
  flush();
  return doc;
}
