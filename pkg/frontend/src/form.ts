/** Ballot-entry form state machine.
 *
 * Auditors build the ranking by appending candidates in preference order
 * (click or number keys), can reorder or remove entries, toggle a
 * ballot-not-found flag, and must pass an explicit confirmation step before
 * anything is submitted. Duplicate candidates are structurally impossible
 * and a blank submission needs its own acknowledgement.
 */
import { MvrPayload } from "./types.js";

export type FormStage = "editing" | "confirming";

export interface BeginConfirmResult {
  ok: boolean;
  needsBlankAck?: boolean;
}

export class EntryForm {
  readonly ballotId: string;
  private ranking: number[] = [];
  private notFoundFlag = false;
  private blankAck = false;
  private stage: FormStage = "editing";

  constructor(ballotId: string, readonly roster: number[]) {
    this.ballotId = ballotId;
  }

  get currentRanking(): readonly number[] {
    return this.ranking;
  }

  get notFound(): boolean {
    return this.notFoundFlag;
  }

  get currentStage(): FormStage {
    return this.stage;
  }

  /** Append the next preference; refuses duplicates and unknown candidates. */
  addCandidate(candidate: number): boolean {
    if (this.stage !== "editing" || this.notFoundFlag) return false;
    if (!this.roster.includes(candidate)) return false;
    if (this.ranking.includes(candidate)) return false;
    this.ranking.push(candidate);
    return true;
  }

  /** Nth roster candidate (1-based), for number-key entry. */
  addByPosition(position: number): boolean {
    const candidate = this.roster[position - 1];
    return candidate === undefined ? false : this.addCandidate(candidate);
  }

  removeLast(): void {
    if (this.stage === "editing") this.ranking.pop();
  }

  removeAt(index: number): void {
    if (this.stage === "editing") this.ranking.splice(index, 1);
  }

  /** Drag-reorder equivalent: move the entry at `index` by `delta`. */
  move(index: number, delta: number): boolean {
    if (this.stage !== "editing") return false;
    const target = index + delta;
    const item = this.ranking[index];
    if (item === undefined || target < 0 || target >= this.ranking.length) return false;
    this.ranking.splice(index, 1);
    this.ranking.splice(target, 0, item);
    return true;
  }

  toggleNotFound(): void {
    if (this.stage !== "editing") return;
    this.notFoundFlag = !this.notFoundFlag;
    if (this.notFoundFlag) this.ranking = [];
  }

  acknowledgeBlank(): void {
    this.blankAck = true;
  }

  /** Move to the confirmation step; a blank ballot needs acknowledgement first. */
  beginConfirm(): BeginConfirmResult {
    if (this.stage !== "editing") return { ok: false };
    if (!this.notFoundFlag && this.ranking.length === 0 && !this.blankAck) {
      return { ok: false, needsBlankAck: true };
    }
    this.stage = "confirming";
    return { ok: true };
  }

  backToEditing(): void {
    this.stage = "editing";
  }

  /** Only valid in the confirmation stage; what actually goes to the server. */
  payload(): MvrPayload {
    if (this.stage !== "confirming") {
      throw new Error("confirm the entry before submitting");
    }
    if (this.notFoundFlag) {
      return { ballot_id: this.ballotId, not_found: true };
    }
    return { ballot_id: this.ballotId, ranking: [...this.ranking] };
  }
}
