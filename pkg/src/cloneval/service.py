"""Study-orchestration HTTP service.

JSON API consumed by the judge UI: tool registration, experiment
lifecycle (upload, filter, sample, auto-resolve, judge tasks, report),
judge management, and label export.  All clone knowledge mutations go
through the knowledge module's single-writer store.
"""

from __future__ import annotations

import secrets
import threading
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from fastapi import Depends, FastAPI, Form, Header, HTTPException, UploadFile
from pydantic import BaseModel

from .corpus import CorpusIndex, UploadRow, parse_pairs_csv, size_filter
from .errors import ClonevalError, MalformedCSV
from .knowledge import KnowledgeBase, KnowledgeSnapshot, PairKey
from .pipeline import ResolutionOutcome
from .stats import aggregate_votes, compute_precision_report
from .study import StudyConfig, plan_sample, resolve_rows


@dataclass
class ToolRegistration:
    tool_id: str
    name: str
    version: str
    description: str
    owner_user: str


@dataclass
class JudgeTask:
    task_id: str
    experiment_id: str
    judge_id: str
    key: PairKey
    status: str = "pending"  # pending | done


@dataclass
class Experiment:
    experiment_id: str
    tool_id: str
    name: str
    owner_user: str
    config: StudyConfig
    uploaded_pair_count: int = 0
    filtered_pair_count: int = 0
    sample: List[UploadRow] = field(default_factory=list)
    resolutions: List[Tuple[PairKey, ResolutionOutcome]] = field(default_factory=list)
    manual_keys: List[PairKey] = field(default_factory=list)
    judges: Set[str] = field(default_factory=set)
    tasks: Dict[str, JudgeTask] = field(default_factory=dict)
    votes: Dict[PairKey, Dict[str, bool]] = field(default_factory=dict)
    state: str = "created"  # created | sampling | judging | complete
    required_n: int = 0
    report: Optional[dict] = None

    def progress(self) -> Tuple[int, int]:
        done = sum(1 for t in self.tasks.values() if t.status == "done")
        return done, len(self.tasks)


class ServiceState:
    def __init__(
        self,
        corpus: CorpusIndex,
        kb: KnowledgeBase,
        model=None,
        config: StudyConfig = StudyConfig(),
    ):
        self.corpus = corpus
        self.kb = kb
        self.model = model
        self.config = config
        self.users: Dict[str, dict] = {}
        self.tokens: Dict[str, str] = {}  # token -> user_id
        self.tools: Dict[str, ToolRegistration] = {}
        self.experiments: Dict[str, Experiment] = {}
        self.idempotency: Dict[str, str] = {}  # request key -> experiment id
        self.lock = threading.Lock()

    # -- users/tools ------------------------------------------------------

    def register_user(self, name: str, email: str) -> dict:
        user_id = f"u-{uuid.uuid4().hex[:12]}"
        token = secrets.token_hex(16)
        self.users[user_id] = {"user_id": user_id, "name": name, "email": email}
        self.tokens[token] = user_id
        self.kb.register_judge(user_id, name, email)
        return {"user_id": user_id, "token": token}

    def register_tool(self, name, version, description, owner) -> ToolRegistration:
        for t in self.tools.values():
            if (t.name, t.version, t.owner_user) == (name, version, owner):
                return t
        tool = ToolRegistration(f"t-{uuid.uuid4().hex[:12]}", name, version, description, owner)
        self.tools[tool.tool_id] = tool
        return tool

    # -- experiments ------------------------------------------------------

    def create_experiment(
        self,
        tool_id: str,
        name: str,
        csv_text: str,
        owner: str,
        config: Optional[StudyConfig] = None,
    ) -> Experiment:
        if tool_id not in self.tools:
            raise HTTPException(404, f"unknown tool {tool_id}")
        cfg = config or self.config
        exp = Experiment(
            experiment_id=f"e-{uuid.uuid4().hex[:12]}",
            tool_id=tool_id,
            name=name,
            owner_user=owner,
            config=cfg,
        )
        rows = parse_pairs_csv(csv_text, self.corpus)
        exp.uploaded_pair_count = len(rows)
        filtered = size_filter(rows, cfg.min_tokens)
        exp.filtered_pair_count = len(filtered)
        exp.state = "sampling"
        sample, required = plan_sample(filtered, cfg)
        exp.sample = sample
        exp.required_n = required
        snapshot = self.kb.snapshot(cfg.trust_similarity_floor)
        exp.resolutions = resolve_rows(sample, snapshot, self.model, cfg)
        exp.manual_keys = [
            key for key, outcome in exp.resolutions if outcome.status == "Manual"
        ]
        if not exp.manual_keys:
            self._complete(exp)
        else:
            exp.state = "judging"
        self.experiments[exp.experiment_id] = exp
        return exp

    def invite_judges(self, experiment_id: str, user_ids: List[str]) -> Experiment:
        exp = self._experiment(experiment_id)
        if exp.state == "complete":
            raise HTTPException(409, "experiment already complete")
        for uid in user_ids:
            if uid not in self.users:
                raise HTTPException(404, f"unregistered user {uid}")
        for uid in user_ids:
            exp.judges.add(uid)
            for key in exp.manual_keys:
                if not any(
                    t.judge_id == uid and t.key == key for t in exp.tasks.values()
                ):
                    task = JudgeTask(
                        task_id=f"k-{uuid.uuid4().hex[:12]}",
                        experiment_id=exp.experiment_id,
                        judge_id=uid,
                        key=key,
                    )
                    exp.tasks[task.task_id] = task
        return exp

    def submit_judgment(
        self,
        task_id: str,
        is_clone: bool,
        clone_type: Optional[str],
        comment: Optional[str],
    ) -> Experiment:
        exp, task = self._find_task(task_id)
        # resubmission replaces the judge's vote; unique-vote upsert
        self.kb.record_judgment(task.key, task.judge_id, is_clone, clone_type, comment)
        exp.votes.setdefault(task.key, {})[task.judge_id] = bool(is_clone)
        task.status = "done"
        done, total = exp.progress()
        if done == total and exp.state != "complete":
            self._complete(exp)
        return exp

    def _complete(self, exp: Experiment) -> None:
        verdicts = {}
        for key in exp.manual_keys:
            votes = list(exp.votes.get(key, {}).values())
            if votes:
                verdicts[key] = aggregate_votes(votes)
        report = compute_precision_report(
            exp.resolutions,
            verdicts,
            required_n=exp.required_n,
            oversample_target=exp.config.sample_target,
        )
        exp.report = report.to_dict()
        exp.state = "complete"

    def _experiment(self, experiment_id: str) -> Experiment:
        exp = self.experiments.get(experiment_id)
        if exp is None:
            raise HTTPException(404, f"unknown experiment {experiment_id}")
        return exp

    def _find_task(self, task_id: str) -> Tuple[Experiment, JudgeTask]:
        for exp in self.experiments.values():
            if task_id in exp.tasks:
                return exp, exp.tasks[task_id]
        raise HTTPException(404, f"unknown task {task_id}")

    def sources_for(self, key: PairKey) -> dict:
        sides = []
        for endpoint in (key.left, key.right):
            folder, file, start, end = endpoint
            try:
                m = self.corpus.locate(folder, file, start, end)
                sides.append(
                    {
                        "folder_name": folder,
                        "file_name": file,
                        "start_line": m.start_line,
                        "end_line": m.end_line,
                        "source": m.source,
                    }
                )
            except ClonevalError as exc:
                sides.append(
                    {
                        "folder_name": folder,
                        "file_name": file,
                        "start_line": start,
                        "end_line": end,
                        "source": "",
                        "problem": str(exc),
                    }
                )
        return {"left": sides[0], "right": sides[1]}


# -- wire models ----------------------------------------------------------


class UserIn(BaseModel):
    name: str
    email: str


class ToolIn(BaseModel):
    name: str
    version: str
    description: str = ""


class JudgesIn(BaseModel):
    user_ids: List[str]


class JudgmentIn(BaseModel):
    is_clone: bool
    clone_type: Optional[str] = None
    comment: Optional[str] = None


def create_app(
    corpus: CorpusIndex,
    kb: KnowledgeBase,
    model=None,
    config: StudyConfig = StudyConfig(),
) -> FastAPI:
    app = FastAPI(title="cloneval")
    state = ServiceState(corpus, kb, model, config)
    app.state.service = state

    def current_user(authorization: Optional[str] = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(401, "missing bearer token")
        token = authorization.removeprefix("Bearer ")
        user = state.tokens.get(token)
        if user is None:
            raise HTTPException(401, "unknown token")
        return user

    @app.post("/users")
    def post_users(body: UserIn):
        return state.register_user(body.name, body.email)

    @app.post("/tools")
    def post_tools(body: ToolIn, user: str = Depends(current_user)):
        tool = state.register_tool(body.name, body.version, body.description, user)
        return {"tool_id": tool.tool_id}

    @app.post("/experiments")
    def post_experiments(
        tool_id: str = Form(...),
        name: str = Form(...),
        results: UploadFile = None,
        user: str = Depends(current_user),
        idempotency_key: Optional[str] = Header(default=None),
    ):
        if idempotency_key and idempotency_key in state.idempotency:
            exp = state._experiment(state.idempotency[idempotency_key])
            return _experiment_view(exp)
        if results is None:
            raise HTTPException(422, "missing results file")
        csv_text = results.file.read().decode("utf-8")
        with state.lock:
            try:
                exp = state.create_experiment(tool_id, name, csv_text, user)
            except MalformedCSV as exc:
                raise HTTPException(400, str(exc))
            except ClonevalError as exc:
                raise HTTPException(400, str(exc))
            if idempotency_key:
                state.idempotency[idempotency_key] = exp.experiment_id
        return _experiment_view(exp)

    @app.get("/experiments/{experiment_id}")
    def get_experiment(experiment_id: str, user: str = Depends(current_user)):
        return _experiment_view(state._experiment(experiment_id))

    @app.post("/experiments/{experiment_id}/judges")
    def post_judges(
        experiment_id: str, body: JudgesIn, user: str = Depends(current_user)
    ):
        with state.lock:
            exp = state.invite_judges(experiment_id, body.user_ids)
        return _experiment_view(exp)

    @app.get("/judges/{judge_id}/tasks")
    def get_judge_tasks(judge_id: str, user: str = Depends(current_user)):
        tasks = []
        for exp in state.experiments.values():
            for task in sorted(exp.tasks.values(), key=lambda t: t.key):
                if task.judge_id == judge_id:
                    tasks.append(
                        {
                            "task_id": task.task_id,
                            "experiment_id": exp.experiment_id,
                            "experiment_name": exp.name,
                            "status": task.status,
                        }
                    )
        return {"tasks": tasks}

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str, user: str = Depends(current_user)):
        exp, task = state._find_task(task_id)
        view = state.sources_for(task.key)
        view.update(
            {
                "task_id": task.task_id,
                "experiment_id": exp.experiment_id,
                "status": task.status,
                "clone_type_options": ["T2", "T3", "T4"],
            }
        )
        return view

    @app.post("/tasks/{task_id}/judgment")
    def post_judgment(
        task_id: str, body: JudgmentIn, user: str = Depends(current_user)
    ):
        if body.clone_type == "T1":
            raise HTTPException(422, "Type I cannot be assigned by judges")
        with state.lock:
            try:
                exp = state.submit_judgment(
                    task_id, body.is_clone, body.clone_type, body.comment
                )
            except ClonevalError as exc:
                raise HTTPException(422, str(exc))
        done, total = exp.progress()
        return {"status": "done", "experiment_state": exp.state, "progress": [done, total]}

    @app.get("/experiments/{experiment_id}/report")
    def get_report(experiment_id: str, user: str = Depends(current_user)):
        exp = state._experiment(experiment_id)
        if exp.state != "complete":
            done, total = exp.progress()
            raise HTTPException(
                409, f"experiment not complete: {done}/{total} tasks done"
            )
        return exp.report

    @app.get("/export/labels")
    def export_labels():
        return {"labels": state.kb.export_labels()}

    return app


def _experiment_view(exp: Experiment) -> dict:
    done, total = exp.progress()
    return {
        "experiment_id": exp.experiment_id,
        "tool_id": exp.tool_id,
        "name": exp.name,
        "state": exp.state,
        "uploaded_pair_count": exp.uploaded_pair_count,
        "filtered_pair_count": exp.filtered_pair_count,
        "sample_size": len(exp.sample),
        "manual_count": len(exp.manual_keys),
        "judges": sorted(exp.judges),
        "progress": [done, total],
        "report_available": exp.report is not None,
    }
